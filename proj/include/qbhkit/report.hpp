#pragma once

// Itemized check results shared by the verification modules.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbhkit/symexpr.hpp"

namespace qbhkit {

/// Verdict classes as they appear in reports and expectations.
enum class VerdictClass { Exact, Numeric, NonZero, Pass, Fail };

std::string_view to_string(VerdictClass c);
std::optional<VerdictClass> verdict_class_from_string(std::string_view s);
VerdictClass verdict_class(const ZeroVerdict& v);

struct CheckItem {
  std::string id;
  std::string label;
  /// Present for identities decided by decide_zero.
  std::optional<ZeroVerdict> verdict;
  bool passed = false;
  /// Diagnostic number attached to the item (e.g. a minimum over samples).
  std::optional<double> value;
  /// Informational items are reported but do not affect the overall status.
  bool gating = true;
  std::string note;

  VerdictClass verdict_class() const;
};

class CheckReport {
 public:
  CheckItem& add_verdict(std::string id, std::string label, ZeroVerdict verdict,
                         bool gating = true);
  CheckItem& add_flag(std::string id, std::string label, bool passed,
                      std::optional<double> value = std::nullopt, bool gating = true);
  void append(const CheckReport& other, std::string_view id_prefix = {});

  const std::vector<CheckItem>& items() const { return items_; }
  bool empty() const { return items_.empty(); }
  /// Conjunction over gating items.
  bool passed() const;
  const CheckItem* find(std::string_view id) const;
  /// Throws std::out_of_range for an unknown id.
  const CheckItem& at(std::string_view id) const;
  /// Worst verdict over gating items that carry one.
  ZeroVerdict worst_verdict() const;

 private:
  std::vector<CheckItem> items_;
};

}  // namespace qbhkit
