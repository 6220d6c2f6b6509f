#include "cme/reaction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cme {

int Reaction::input_total() const {
  int s = 0;
  for (int v : inputs) s += v;
  return s;
}

int Reaction::output_total() const {
  int s = 0;
  for (int v : outputs) s += v;
  return s;
}

void ReactionSystem::validate() const {
  const size_t n = species.size();
  if (n == 0) throw std::invalid_argument("system has no species");
  for (const auto& r : reactions) {
    if (r.inputs.size() != n || r.outputs.size() != n)
      throw std::invalid_argument("reaction stoichiometry size differs from species count");
    for (int v : r.inputs)
      if (v < 0) throw std::invalid_argument("negative input stoichiometry");
    for (int v : r.outputs)
      if (v < 0) throw std::invalid_argument("negative output stoichiometry");
    if (r.input_total() == 0 && r.output_total() == 0)
      throw std::invalid_argument("empty reaction (0 -> 0)");
    if (sgn(r.rate) < 0) throw std::invalid_argument("negative reaction rate");
  }
  if (!initial.empty()) {
    double sum = 0.0;
    for (const auto& [counts, p] : initial) {
      if (counts.size() != n) throw std::invalid_argument("initial state size differs from species count");
      for (int v : counts)
        if (v < 0) throw std::invalid_argument("negative count in initial state");
      if (p < 0.0) throw std::invalid_argument("negative initial probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("initial distribution does not sum to 1");
  }
}

int ReactionSystem::max_initial_count(int species_idx) const {
  int m = 0;
  for (const auto& [counts, p] : initial)
    if (p > 0.0) m = std::max(m, counts[species_idx]);
  return m;
}

std::string to_string(SystemClass c) {
  switch (c) {
    case SystemClass::NonBinary: return "NonBinary";
    case SystemClass::BinarySJ: return "BinarySJ";
    case SystemClass::SemiLinearMulti: return "SemiLinearMulti";
    case SystemClass::Generic: return "Generic";
  }
  return "?";
}

SystemClass classify(const ReactionSystem& system) {
  bool semi_linear = true;
  for (const auto& r : system.reactions)
    if (r.input_total() > 1) semi_linear = false;
  if (system.n_species() == 1) {
    if (semi_linear) return SystemClass::NonBinary;
    bool sj = true;
    for (const auto& r : system.reactions) {
      const int i = r.inputs[0], o = r.outputs[0];
      const bool known = (i == 1 && o == 0) || (i == 2 && o == 0) || (i == 2 && o == 1);
      if (!known) sj = false;
    }
    return sj ? SystemClass::BinarySJ : SystemClass::Generic;
  }
  return semi_linear ? SystemClass::SemiLinearMulti : SystemClass::Generic;
}

namespace {

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1, col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }
  void skip_blanks() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
  }
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// One side of a reaction: "0", the empty-set symbol, or terms joined by '+'.
std::vector<std::pair<int, std::string>> parse_side(Cursor& cur) {
  std::vector<std::pair<int, std::string>> terms;
  cur.skip_blanks();
  if (cur.eof()) throw ParseError("expected reaction side", cur.line, cur.col);
  // UTF-8 empty-set symbol.
  if (static_cast<unsigned char>(cur.peek()) == 0xE2 && cur.text.compare(cur.pos, 3, "\xE2\x88\x85") == 0) {
    cur.advance();
    cur.advance();
    cur.advance();
    return terms;
  }
  while (true) {
    cur.skip_blanks();
    int coeff = 1;
    bool saw_coeff = false;
    if (!cur.eof() && std::isdigit(static_cast<unsigned char>(cur.peek()))) {
      long v = 0;
      while (!cur.eof() && std::isdigit(static_cast<unsigned char>(cur.peek()))) {
        v = v * 10 + (cur.peek() - '0');
        cur.advance();
      }
      coeff = static_cast<int>(v);
      saw_coeff = true;
    }
    cur.skip_blanks();
    if (!cur.eof() && ident_start(cur.peek())) {
      std::string name;
      while (!cur.eof() && ident_char(cur.peek())) {
        name += cur.peek();
        cur.advance();
      }
      terms.push_back({coeff, name});
    } else if (saw_coeff && coeff == 0 && terms.empty()) {
      return terms;  // bare "0": empty side
    } else {
      throw ParseError("expected species name", cur.line, cur.col);
    }
    cur.skip_blanks();
    if (!cur.eof() && cur.peek() == '+') {
      cur.advance();
      continue;
    }
    break;
  }
  return terms;
}

BigRational parse_rate(Cursor& cur) {
  cur.skip_blanks();
  const int line = cur.line, col = cur.col;
  std::string tok;
  while (!cur.eof() && !std::isspace(static_cast<unsigned char>(cur.peek())) && cur.peek() != '#') {
    tok += cur.peek();
    cur.advance();
  }
  if (tok.empty()) throw ParseError("expected rate literal", line, col);
  BigRational r;
  try {
    r = parse_rational(tok);
  } catch (const std::exception&) {
    throw ParseError("malformed rate literal '" + tok + "'", line, col);
  }
  if (sgn(r) < 0) throw ParseError("negative rate", line, col);
  return r;
}

}  // namespace

ReactionSystem parse_dsl(const std::string& text) {
  ReactionSystem sys;
  std::map<std::string, int> index;
  struct RawReaction {
    std::vector<std::pair<int, std::string>> in, out;
    BigRational rate;
    int line, col;
  };
  std::vector<RawReaction> raw;

  Cursor cur{text};
  while (!cur.eof()) {
    cur.skip_blanks();
    if (cur.eof()) break;
    if (cur.peek() == '\n') {
      cur.advance();
      continue;
    }
    if (cur.peek() == '#') {  // comment to end of line
      while (!cur.eof() && cur.peek() != '\n') cur.advance();
      continue;
    }
    RawReaction rr;
    rr.line = cur.line;
    rr.col = cur.col;
    rr.in = parse_side(cur);
    cur.skip_blanks();
    if (cur.eof() || cur.peek() != '-') throw ParseError("expected '->'", cur.line, cur.col);
    cur.advance();
    if (cur.eof() || cur.peek() != '>') throw ParseError("expected '->'", cur.line, cur.col);
    cur.advance();
    rr.out = parse_side(cur);
    cur.skip_blanks();
    if (cur.eof() || cur.peek() != '@') throw ParseError("expected '@' before rate", cur.line, cur.col);
    cur.advance();
    rr.rate = parse_rate(cur);
    cur.skip_blanks();
    if (!cur.eof() && cur.peek() == '#')
      while (!cur.eof() && cur.peek() != '\n') cur.advance();
    if (!cur.eof()) {
      if (cur.peek() != '\n') throw ParseError("trailing characters after reaction", cur.line, cur.col);
      cur.advance();
    }
    for (const auto& [c, name] : rr.in)
      if (!index.count(name)) {
        index[name] = static_cast<int>(sys.species.size());
        sys.species.push_back(name);
      }
    for (const auto& [c, name] : rr.out)
      if (!index.count(name)) {
        index[name] = static_cast<int>(sys.species.size());
        sys.species.push_back(name);
      }
    raw.push_back(std::move(rr));
  }
  if (sys.species.empty()) throw ParseError("no reactions found", cur.line, cur.col);

  const int n = sys.n_species();
  for (const auto& rr : raw) {
    Reaction r;
    r.inputs.assign(n, 0);
    r.outputs.assign(n, 0);
    for (const auto& [c, name] : rr.in) r.inputs[index[name]] += c;
    for (const auto& [c, name] : rr.out) r.outputs[index[name]] += c;
    r.rate = rr.rate;
    if (r.input_total() == 0 && r.output_total() == 0)
      throw ParseError("empty reaction (0 -> 0)", rr.line, rr.col);
    sys.reactions.push_back(std::move(r));
  }
  return sys;
}

namespace {

std::string side_to_dsl(const std::vector<int>& counts, const std::vector<std::string>& species) {
  std::string out;
  for (size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    if (!out.empty()) out += " + ";
    out += std::to_string(counts[j]) + " " + species[j];
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string to_dsl(const ReactionSystem& system) {
  std::string out;
  for (const auto& r : system.reactions) {
    out += side_to_dsl(r.inputs, system.species);
    out += " -> ";
    out += side_to_dsl(r.outputs, system.species);
    out += " @ ";
    out += r.rate.get_str();
    out += "\n";
  }
  return out;
}

std::string join_counts(const std::vector<int>& counts) {
  std::string key;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (i) key += ",";
    key += std::to_string(counts[i]);
  }
  return key;
}

std::vector<int> split_counts(const std::string& key, int n_species) {
  std::vector<int> counts;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) counts.push_back(std::stoi(part));
  if (static_cast<int>(counts.size()) != n_species)
    throw std::invalid_argument("count vector '" + key + "' has wrong length");
  return counts;
}

ReactionSystem system_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  ReactionSystem sys;
  for (const auto& s : j.at("species")) sys.species.push_back(s.get<std::string>());
  std::map<std::string, int> index;
  for (int i = 0; i < sys.n_species(); ++i) index[sys.species[i]] = i;
  const int n = sys.n_species();
  for (const auto& rj : j.at("reactions")) {
    Reaction r;
    r.inputs.assign(n, 0);
    r.outputs.assign(n, 0);
    for (const auto& [name, v] : rj.at("in").items()) r.inputs.at(index.at(name)) = v.get<int>();
    for (const auto& [name, v] : rj.at("out").items()) r.outputs.at(index.at(name)) = v.get<int>();
    // Numeric rates go through their shortest decimal form so "0.025" means
    // exactly 1/40 rather than the nearest binary double.
    const auto& rv = rj.at("rate");
    r.rate = parse_rational(rv.is_string() ? rv.get<std::string>() : rv.dump());
    sys.reactions.push_back(std::move(r));
  }
  if (j.contains("initial"))
    for (const auto& [key, v] : j.at("initial").items())
      sys.initial[split_counts(key, n)] = v.get<double>();
  sys.validate();
  return sys;
}

std::string system_to_json(const ReactionSystem& system) {
  nlohmann::json j;
  j["species"] = system.species;
  j["reactions"] = nlohmann::json::array();
  for (const auto& r : system.reactions) {
    nlohmann::json rj;
    rj["in"] = nlohmann::json::object();
    rj["out"] = nlohmann::json::object();
    for (int s = 0; s < static_cast<int>(system.species.size()); ++s) {
      if (r.inputs[s]) rj["in"][system.species[s]] = r.inputs[s];
      if (r.outputs[s]) rj["out"][system.species[s]] = r.outputs[s];
    }
    rj["rate"] = r.rate.get_str();
    j["reactions"].push_back(rj);
  }
  if (!system.initial.empty()) {
    nlohmann::json init = nlohmann::json::object();
    for (const auto& [counts, p] : system.initial) init[join_counts(counts)] = p;
    j["initial"] = init;
  }
  return j.dump(2);
}

}  // namespace cme
