#ifndef CME_REACTION_HPP
#define CME_REACTION_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cme/rational.hpp"

namespace cme {

struct Reaction {
  std::vector<int> inputs;   // i_j per species
  std::vector<int> outputs;  // o_j per species
  BigRational rate;          // >= 0, kept exact

  double rate_d() const { return to_double(rate); }
  int input_total() const;
  int output_total() const;
};

// Finite-support initial distribution: count vector -> probability.
using InitialDistribution = std::map<std::vector<int>, double>;

struct ReactionSystem {
  std::vector<std::string> species;
  std::vector<Reaction> reactions;
  InitialDistribution initial;

  int n_species() const { return static_cast<int>(species.size()); }
  // Throws std::invalid_argument on malformed stoichiometry or an initial
  // distribution that is negative or fails to sum to 1 within 1e-12.
  void validate() const;
  int max_initial_count(int species_idx) const;
};

enum class SystemClass { NonBinary, BinarySJ, SemiLinearMulti, Generic };

std::string to_string(SystemClass c);

// NonBinary: single species, every reaction consumes at most one particle.
// BinarySJ: single species, reactions within {A->0, 2A->0, 2A->A}.
// SemiLinearMulti: several species, every reaction consumes at most one
// particle in total.  Everything else is Generic.
SystemClass classify(const ReactionSystem& system);

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                           std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line, col;
};

// Text DSL, one reaction per line:  "2 A -> 0 A @ 0.025".  "0" and the
// empty-set symbol both denote the empty side; species coefficients default
// to 1; rates are decimal or rational literals.
ReactionSystem parse_dsl(const std::string& text);
std::string to_dsl(const ReactionSystem& system);

// JSON system format:
//   {"species": ["A"],
//    "reactions": [{"in": {"A": 2}, "out": {}, "rate": 0.025}],
//    "initial": {"100": 1.0}}
// Initial keys are comma-joined count vectors.
ReactionSystem system_from_json(const std::string& json_text);
std::string system_to_json(const ReactionSystem& system);

std::string join_counts(const std::vector<int>& counts);
std::vector<int> split_counts(const std::string& key, int n_species);

}  // namespace cme

#endif
