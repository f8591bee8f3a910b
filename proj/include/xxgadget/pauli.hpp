// Copyright 2026 The xxgadget Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xxgadget {

/** Single-qubit Pauli operator (or identity). */
enum class PauliAxis : std::uint8_t { I, X, Y, Z };

inline char to_char(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::I: return 'I';
    case PauliAxis::X: return 'X';
    case PauliAxis::Y: return 'Y';
    case PauliAxis::Z: return 'Z';
  }
  return '?';
}

inline PauliAxis pauli_from_char(char c) {
  switch (c) {
    case 'I': case 'i': return PauliAxis::I;
    case 'X': case 'x': return PauliAxis::X;
    case 'Y': case 'y': return PauliAxis::Y;
    case 'Z': case 'z': return PauliAxis::Z;
    default: throw std::invalid_argument(std::string("unknown Pauli axis '") + c + "'");
  }
}

/*******************************************************************************
 * BASIS CONVENTION
 *
 * Qubits are labelled 1..n in every public interface. Qubit 1 is the MOST
 * significant bit of a computational-basis index, so |q1 q2 ... qn> has index
 * sum_q b_q 2^(n-q). Bit value 1 is the Z = -1 eigenstate. These helpers are
 * the only place the label-to-bit mapping is written down.
 ******************************************************************************/

using BasisIndex = std::uint64_t;

/** Number of qubits supported when a Hamiltonian is turned into a matrix. */
inline constexpr unsigned kMaxMatrixQubits = 30;

inline constexpr BasisIndex qubit_mask(unsigned qubit, unsigned n_qubits) {
  return BasisIndex{1} << (n_qubits - qubit);
}

inline constexpr bool qubit_bit(BasisIndex index, unsigned qubit,
                                unsigned n_qubits) {
  return (index & qubit_mask(qubit, n_qubits)) != 0;
}

inline unsigned hamming_weight(BasisIndex index) {
  return static_cast<unsigned>(__builtin_popcountll(index));
}

/** Renders a basis index as a bitstring, qubit 1 first. */
inline std::string bitstring(BasisIndex index, unsigned n_qubits) {
  std::string out(n_qubits, '0');
  for (unsigned q = 1; q <= n_qubits; ++q)
    if (qubit_bit(index, q, n_qubits)) out[q - 1] = '1';
  return out;
}

inline BasisIndex parse_bitstring(std::string_view bits) {
  BasisIndex index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("bitstring must contain only 0/1: " +
                                  std::string(bits));
    index = (index << 1) | static_cast<BasisIndex>(c == '1');
  }
  return index;
}

/**
 * A real-weighted tensor product of single-qubit Pauli operators.
 *
 * Identity factors are never stored; a term with no factors is a multiple of
 * the identity.
 */
struct PauliTerm {
  double coefficient = 0.0;
  std::map<unsigned, PauliAxis> factors;

  PauliTerm() = default;
  explicit PauliTerm(double coeff) : coefficient(coeff) {}
  PauliTerm(double coeff,
            std::initializer_list<std::pair<unsigned, PauliAxis>> ops)
      : coefficient(coeff) {
    for (const auto& [q, axis] : ops) set(q, axis);
    check_finite();
  }

  /** Adds a factor. A qubit may only appear once. */
  PauliTerm& set(unsigned qubit, PauliAxis axis) {
    if (qubit == 0) throw std::invalid_argument("qubit labels are 1-based");
    if (factors.count(qubit))
      throw std::invalid_argument("qubit " + std::to_string(qubit) +
                                  " appears twice in a Pauli term");
    if (axis != PauliAxis::I) factors.emplace(qubit, axis);
    return *this;
  }

  std::size_t arity() const { return factors.size(); }

  unsigned max_qubit() const {
    return factors.empty() ? 0u : factors.rbegin()->first;
  }

  bool is_diagonal() const {
    return std::all_of(factors.begin(), factors.end(), [](const auto& f) {
      return f.second == PauliAxis::Z;
    });
  }

  void check_finite() const {
    if (!std::isfinite(coefficient))
      throw std::invalid_argument("Pauli term coefficient must be finite");
  }

  bool operator==(const PauliTerm&) const = default;
};

/** Shorthand constructors. */
inline PauliTerm identity_term(double c) { return PauliTerm(c); }
inline PauliTerm x_term(double c, unsigned q) { return PauliTerm(c, {{q, PauliAxis::X}}); }
inline PauliTerm y_term(double c, unsigned q) { return PauliTerm(c, {{q, PauliAxis::Y}}); }
inline PauliTerm z_term(double c, unsigned q) { return PauliTerm(c, {{q, PauliAxis::Z}}); }
inline PauliTerm zz_term(double c, unsigned a, unsigned b) {
  return PauliTerm(c, {{a, PauliAxis::Z}, {b, PauliAxis::Z}});
}
inline PauliTerm xx_term(double c, unsigned a, unsigned b) {
  return PauliTerm(c, {{a, PauliAxis::X}, {b, PauliAxis::X}});
}

/**
 * A sum of Pauli terms on a fixed register of qubits. Coefficients are real
 * and every Pauli string is Hermitian, so an Observable is Hermitian.
 */
class Observable {
 public:
  explicit Observable(unsigned n_qubits = 1) : n_qubits_(n_qubits) {
    if (n_qubits == 0) throw std::invalid_argument("n_qubits must be positive");
  }

  Observable(unsigned n_qubits, std::vector<PauliTerm> terms)
      : Observable(n_qubits) {
    for (auto& t : terms) add(std::move(t));
  }

  Observable& add(PauliTerm term) {
    term.check_finite();
    if (term.max_qubit() > n_qubits_)
      throw std::out_of_range("qubit " + std::to_string(term.max_qubit()) +
                              " exceeds register of " +
                              std::to_string(n_qubits_) + " qubits");
    terms_.push_back(std::move(term));
    return *this;
  }

  /** Concatenates the term lists. */
  Observable& operator+=(const Observable& other) {
    if (other.n_qubits_ != n_qubits_)
      throw std::invalid_argument("cannot add Observables on different registers");
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
  }

  friend Observable operator+(Observable a, const Observable& b) {
    a += b;
    return a;
  }

  friend Observable operator*(double factor, Observable obs) {
    for (auto& t : obs.terms_) t.coefficient *= factor;
    return obs;
  }

  unsigned n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  std::size_t max_arity() const {
    std::size_t a = 0;
    for (const auto& t : terms_) a = std::max(a, t.arity());
    return a;
  }

 private:
  unsigned n_qubits_;
  std::vector<PauliTerm> terms_;
};

/*******************************************************************************
 * TEXT SERIALIZATION
 *
 * One term per line: `coeff op@q op@q ...`, e.g. `-100 Z@1 Z@2 Z@3`. A bare
 * coefficient is an identity term. `#` starts a comment; the optional header
 * `# n_qubits: N` fixes the register size, otherwise it is inferred.
 ******************************************************************************/

inline std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string to_text(const PauliTerm& term) {
  std::string out = format_real(term.coefficient);
  for (const auto& [q, axis] : term.factors) {
    out += ' ';
    out += to_char(axis);
    out += '@';
    out += std::to_string(q);
  }
  return out;
}

inline std::string to_text(const Observable& obs) {
  std::string out = "# n_qubits: " + std::to_string(obs.n_qubits()) + "\n";
  for (const auto& t : obs.terms()) out += to_text(t) + "\n";
  return out;
}

inline PauliTerm parse_term(std::string_view line) {
  std::istringstream is{std::string(line)};
  std::string tok;
  if (!(is >> tok)) throw std::invalid_argument("empty Pauli term line");
  PauliTerm term;
  try {
    std::size_t used = 0;
    term.coefficient = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad coefficient '" + tok + "'");
  }
  while (is >> tok) {
    auto at = tok.find('@');
    if (at != 1 || tok.size() < 3)
      throw std::invalid_argument("bad factor '" + tok + "', expected op@qubit");
    unsigned q = 0;
    auto [ptr, ec] = std::from_chars(tok.data() + 2, tok.data() + tok.size(), q);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw std::invalid_argument("bad qubit label in '" + tok + "'");
    term.set(q, pauli_from_char(tok[0]));
  }
  term.check_finite();
  return term;
}

inline Observable parse_observable(std::istream& in, unsigned n_qubits = 0) {
  std::vector<PauliTerm> terms;
  std::string line;
  unsigned declared = 0;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) {
      auto key = line.find("n_qubits:", hash);
      if (key != std::string::npos)
        declared = static_cast<unsigned>(std::stoul(line.substr(key + 9)));
      line.erase(hash);
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    terms.push_back(parse_term(line));
  }
  unsigned n = n_qubits ? n_qubits : declared;
  if (n == 0) {
    for (const auto& t : terms) n = std::max(n, t.max_qubit());
    n = std::max(n, 1u);
  }
  return Observable(n, std::move(terms));
}

inline Observable parse_observable(std::string_view text, unsigned n_qubits = 0) {
  std::istringstream is{std::string(text)};
  return parse_observable(is, n_qubits);
}

}  // namespace xxgadget
