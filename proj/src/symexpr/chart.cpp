#include <algorithm>
#include <set>

#include "qbhkit/symexpr.hpp"

namespace qbhkit {

Chart::Chart(std::vector<std::string> names, std::vector<Interval> box, std::vector<Expr> guards)
    : names_(std::move(names)), box_(std::move(box)), guards_(std::move(guards)) {
  if (names_.size() < 2) throw PreconditionError("a chart needs at least two coordinates");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw PreconditionError("empty coordinate name");
    if (!seen.insert(n).second) throw PreconditionError("duplicate coordinate '" + n + "'");
  }
  if (box_.empty()) box_.assign(names_.size(), Interval{});
  if (box_.size() != names_.size()) {
    throw PreconditionError("sampling box has " + std::to_string(box_.size()) +
                            " intervals for " + std::to_string(names_.size()) + " coordinates");
  }
  for (std::size_t i = 0; i < box_.size(); ++i) {
    if (!(box_[i].lo <= box_[i].hi)) {
      throw PreconditionError("empty sampling interval for '" + names_[i] + "'");
    }
  }
  for (const auto& g : guards_) require_in_chart(g, *this);
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

bool Chart::satisfies_guards(std::span<const double> point) const {
  for (const auto& g : guards_) {
    try {
      if (!(evaluate_unchecked(g, point) > 0.0)) return false;
    } catch (const DomainError&) {
      return false;
    }
  }
  return true;
}

ChartPtr make_chart(std::vector<std::string> names, std::vector<Interval> box,
                    const std::vector<std::string>& guards) {
  Chart bare(names, box);
  std::vector<Expr> parsed;
  parsed.reserve(guards.size());
  for (const auto& g : guards) parsed.push_back(parse_expr(g, bare));
  return std::make_shared<const Chart>(std::move(names), std::move(box), std::move(parsed));
}

void require_in_chart(const Expr& e, const Chart& chart) {
  for (std::size_t v : collect_symbols(e).vars) {
    if (v >= chart.dim()) {
      throw ChartMismatch("expression uses coordinate index " + std::to_string(v) +
                          " on a chart of dimension " + std::to_string(chart.dim()));
    }
  }
}

}  // namespace qbhkit
