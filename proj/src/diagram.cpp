#include "pif/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "pif/errors.hpp"
#include "pif/text.hpp"

namespace pif {

namespace {

void check_pair(const PersistencePair& p) {
  if (!std::isfinite(p.birth)) throw ArgumentError("persistence pair birth must be finite");
  if (std::isnan(p.death) || p.death < p.birth) throw ArgumentError("persistence pair needs birth <= death");
}

}  // namespace

PersistenceDiagram::PersistenceDiagram(std::size_t dimension, std::vector<PersistencePair> pairs)
    : dimension_(dimension), pairs_(std::move(pairs)) {
  for (const auto& p : pairs_) check_pair(p);
}

void PersistenceDiagram::add(PersistencePair pair) {
  check_pair(pair);
  pairs_.push_back(pair);
}

PersistenceDiagram PersistenceDiagram::merged_with(const PersistenceDiagram& other) const {
  if (other.dimension_ != dimension_) throw ArgumentError("cannot merge diagrams of different dimensions");
  auto pairs = pairs_;
  pairs.insert(pairs.end(), other.pairs_.begin(), other.pairs_.end());
  return PersistenceDiagram(dimension_, std::move(pairs));
}

bool PersistenceDiagram::has_essential() const noexcept {
  return std::any_of(pairs_.begin(), pairs_.end(), [](const auto& p) { return p.essential(); });
}

bool operator==(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  if (a.dimension_ != b.dimension_ || a.pairs_.size() != b.pairs_.size()) return false;
  auto x = a.pairs_;
  auto y = b.pairs_;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

EssentialPolicy EssentialPolicy::truncate_at(double threshold) {
  if (!std::isfinite(threshold)) throw ArgumentError("truncation threshold must be finite");
  return EssentialPolicy(threshold);
}

PersistenceDiagram apply_policy(const PersistenceDiagram& d, const EssentialPolicy& policy) {
  std::vector<PersistencePair> out;
  out.reserve(d.size());
  const auto t = policy.threshold();
  for (const auto& p : d.pairs()) {
    if (t) {
      if (p.birth > *t || (!p.essential() && p.death > *t)) {
        throw PreconditionError("truncation threshold " + text::format_real(*t) +
                                " lies below a finite diagram value");
      }
      out.push_back(p.essential() ? PersistencePair{p.birth, *t} : p);
    } else if (!p.essential()) {
      out.push_back(p);
    }
  }
  return PersistenceDiagram(d.dimension(), std::move(out));
}

StepFunction to_pif(const PersistenceDiagram& d) {
  if (d.has_essential()) {
    throw PreconditionError("diagram has essential pairs; choose drop or truncate");
  }
  // Event sweep: +1 at births, -1 at deaths, accumulated per distinct abscissa.
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * d.size());
  for (const auto& p : d.pairs()) {
    if (p.birth == p.death) continue;
    events.emplace_back(p.birth, +1);
    events.emplace_back(p.death, -1);
  }
  std::sort(events.begin(), events.end());
  std::vector<double> xs;
  std::vector<double> vs;
  long long count = 0;
  for (std::size_t i = 0; i < events.size();) {
    const double x = events[i].first;
    if (!xs.empty()) vs.push_back(static_cast<double>(count));
    while (i < events.size() && events[i].first == x) count += events[i++].second;
    xs.push_back(x);
  }
  return StepFunction(std::move(xs), std::move(vs));
}

StepFunction to_pif(const PersistenceDiagram& d, const EssentialPolicy& policy) {
  return to_pif(apply_policy(d, policy));
}

std::size_t count_containing(const PersistenceDiagram& d, double eps) {
  if (!std::isfinite(eps)) throw ArgumentError("scale must be finite");
  return static_cast<std::size_t>(std::count_if(d.pairs().begin(), d.pairs().end(), [eps](const auto& p) {
    return p.birth <= eps && eps <= p.death;
  }));
}

double total_persistence(const PersistenceDiagram& d) {
  double sum = 0.0;
  for (const auto& p : d.pairs()) {
    if (p.essential()) throw PreconditionError("total persistence of an essential pair is infinite");
    sum += p.persistence();
  }
  return sum;
}

std::vector<PersistenceDiagram> read_diagrams(std::istream& in) {
  struct Block {
    std::size_t dimension;
    bool explicit_header;
    std::vector<PersistencePair> pairs;
  };
  std::vector<PersistenceDiagram> out;
  std::optional<Block> current;
  std::size_t next_dimension = 0;
  auto flush = [&] {
    if (!current) return;
    if (current->explicit_header || !current->pairs.empty()) {
      out.emplace_back(current->dimension, std::move(current->pairs));
      next_dimension = current->dimension + 1;
    }
    current.reset();
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty()) {
      if (current && !current->pairs.empty()) flush();
      continue;
    }
    if (body.front() == '#') {
      const auto fields = text::split_fields(body.substr(1));
      if (fields.size() == 2 && fields[0] == "dim") {
        const auto k = text::parse_integer(fields[1], line_no);
        if (k < 0) throw ParseError("dimension must be nonnegative", line_no);
        flush();
        current = Block{static_cast<std::size_t>(k), true, {}};
      }
      continue;
    }
    const auto fields = text::split_fields(body);
    if (fields.size() != 2) throw ParseError("expected 'birth death'", line_no);
    const double birth = text::parse_real(fields[0], line_no);
    const double death = text::parse_real(fields[1], line_no);
    if (!std::isfinite(birth)) throw ValidationError("birth must be finite", line_no);
    if (birth > death) throw ValidationError("birth exceeds death", line_no);
    if (!current) current = Block{next_dimension, false, {}};
    current->pairs.push_back({birth, death});
  }
  flush();
  return out;
}

void write_diagram(std::ostream& out, const PersistenceDiagram& diagram) {
  out << "# dim " << diagram.dimension() << '\n';
  for (const auto& p : diagram.pairs()) {
    out << text::format_real(p.birth) << ' ' << text::format_real(p.death) << '\n';
  }
}

void write_diagrams(std::ostream& out, const std::vector<PersistenceDiagram>& diagrams) {
  for (std::size_t i = 0; i < diagrams.size(); ++i) {
    if (i > 0) out << '\n';
    write_diagram(out, diagrams[i]);
  }
}

}  // namespace pif
