#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "pif/stepfn.hpp"

namespace pif {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;

  double persistence() const noexcept { return death - birth; }
  bool essential() const noexcept { return death == kInfinity; }

  friend auto operator<=>(const PersistencePair&, const PersistencePair&) = default;
};

/// Multiset of persistence pairs for one homology dimension.
class PersistenceDiagram {
 public:
  PersistenceDiagram() = default;
  /// Throws ArgumentError unless every pair has finite birth and birth <= death.
  explicit PersistenceDiagram(std::size_t dimension, std::vector<PersistencePair> pairs = {});

  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<PersistencePair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }

  void add(PersistencePair pair);
  /// Multiset union; dimensions must agree.
  PersistenceDiagram merged_with(const PersistenceDiagram& other) const;
  bool has_essential() const noexcept;

  /// Multiset equality (order of pairs is irrelevant).
  friend bool operator==(const PersistenceDiagram& a, const PersistenceDiagram& b);

 private:
  std::size_t dimension_ = 0;
  std::vector<PersistencePair> pairs_;
};

/// How pairs with infinite death enter a PIF: dropped, or clipped at a finite scale.
class EssentialPolicy {
 public:
  static EssentialPolicy drop() { return EssentialPolicy(std::nullopt); }
  static EssentialPolicy truncate_at(double threshold);

  bool drops() const noexcept { return !threshold_; }
  std::optional<double> threshold() const noexcept { return threshold_; }

  friend bool operator==(const EssentialPolicy&, const EssentialPolicy&) = default;

 private:
  explicit EssentialPolicy(std::optional<double> t) : threshold_(t) {}
  std::optional<double> threshold_;
};

/// Applies the policy: drops essential pairs or replaces their death by T.
/// TruncateAt(T) with T below any finite value of the diagram is a PreconditionError.
PersistenceDiagram apply_policy(const PersistenceDiagram& d, const EssentialPolicy& policy);

/// PIF with half-open intervals: eps -> #{(c,d) : c <= eps < d}.
/// Without a policy, an essential pair is a PreconditionError.
StepFunction to_pif(const PersistenceDiagram& d);
StepFunction to_pif(const PersistenceDiagram& d, const EssentialPolicy& policy);

/// Closed-interval count #{(c,d) : c <= eps <= d}. Throws ArgumentError for non-finite eps.
std::size_t count_containing(const PersistenceDiagram& d, double eps);

/// Sum of (death - birth). PreconditionError on essential pairs.
double total_persistence(const PersistenceDiagram& d);

/// Text format: `birth death` lines, `inf` allowed for deaths, `#` comments.
/// A `# dim k` comment or a blank line after pairs starts a new block; block
/// dimensions default to one more than the previous block, starting at 0.
std::vector<PersistenceDiagram> read_diagrams(std::istream& in);
void write_diagrams(std::ostream& out, const std::vector<PersistenceDiagram>& diagrams);
void write_diagram(std::ostream& out, const PersistenceDiagram& diagram);

}  // namespace pif
