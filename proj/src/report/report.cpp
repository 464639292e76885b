#include "qbhkit/report.hpp"

#include <stdexcept>

namespace qbhkit {

std::string_view to_string(VerdictClass c) {
  switch (c) {
    case VerdictClass::Exact: return "exact";
    case VerdictClass::Numeric: return "numeric";
    case VerdictClass::NonZero: return "nonzero";
    case VerdictClass::Pass: return "pass";
    case VerdictClass::Fail: return "fail";
  }
  return "?";
}

std::optional<VerdictClass> verdict_class_from_string(std::string_view s) {
  for (auto c : {VerdictClass::Exact, VerdictClass::Numeric, VerdictClass::NonZero,
                 VerdictClass::Pass, VerdictClass::Fail}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

VerdictClass verdict_class(const ZeroVerdict& v) {
  switch (v.kind) {
    case ZeroKind::ExactZero: return VerdictClass::Exact;
    case ZeroKind::NumericallyZero: return VerdictClass::Numeric;
    case ZeroKind::NonZero: return VerdictClass::NonZero;
  }
  return VerdictClass::NonZero;
}

VerdictClass CheckItem::verdict_class() const {
  if (verdict) return qbhkit::verdict_class(*verdict);
  return passed ? VerdictClass::Pass : VerdictClass::Fail;
}

CheckItem& CheckReport::add_verdict(std::string id, std::string label, ZeroVerdict verdict,
                                    bool gating) {
  CheckItem item;
  item.id = std::move(id);
  item.label = std::move(label);
  item.passed = verdict.is_zero();
  item.verdict = std::move(verdict);
  item.gating = gating;
  items_.push_back(std::move(item));
  return items_.back();
}

CheckItem& CheckReport::add_flag(std::string id, std::string label, bool passed,
                                 std::optional<double> value, bool gating) {
  CheckItem item;
  item.id = std::move(id);
  item.label = std::move(label);
  item.passed = passed;
  item.value = value;
  item.gating = gating;
  items_.push_back(std::move(item));
  return items_.back();
}

void CheckReport::append(const CheckReport& other, std::string_view id_prefix) {
  for (CheckItem item : other.items_) {
    item.id = std::string(id_prefix) + item.id;
    items_.push_back(std::move(item));
  }
}

bool CheckReport::passed() const {
  for (const auto& item : items_) {
    if (item.gating && !item.passed) return false;
  }
  return true;
}

const CheckItem* CheckReport::find(std::string_view id) const {
  for (const auto& item : items_) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

const CheckItem& CheckReport::at(std::string_view id) const {
  if (const CheckItem* item = find(id)) return *item;
  throw std::out_of_range("no check item '" + std::string(id) + "'");
}

ZeroVerdict CheckReport::worst_verdict() const {
  std::vector<ZeroVerdict> verdicts;
  for (const auto& item : items_) {
    if (item.gating && item.verdict) verdicts.push_back(*item.verdict);
  }
  return merge_verdicts(verdicts);
}

}  // namespace qbhkit
