#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decoq/params.hpp"
#include "decoq/quadrature.hpp"

namespace decoq {

// Cavity operators that can ride along a qubit operator in a mixed moment.
enum class CavOp { One, B, Bdag, N, BBdag };

// All internal moments of one three-level qubit: sigma[a][b] = <|a><b|>.
// Optical coherences live in the a=2 row/column, populations on the diagonal.
struct QubitMoments {
  std::array<std::array<Complex, 3>, 3> sigma{};
};

struct CavityMoments {
  Complex b{};    // <b>; <b dag> = conj
  double n = 0;   // <b dag b>; <b b dag> = n + 1 identically
};

struct PairOpKey {
  long g = 0, h = 0;
  int r1 = 0, c1 = 0, r2 = 0, c2 = 0;
  auto operator<=>(const PairOpKey&) const = default;
};

struct MixedKey {
  long qubit = 0;
  int r = 0, c = 0;
  CavOp op = CavOp::One;
  auto operator<=>(const MixedKey&) const = default;
};

// Moments of a structured qubit+cavity state. Storage is O(#special qubits):
// every qubit shares `uniform` unless listed in `special`. Pair and mixed
// moments default to products of the single-operator moments; entries in the
// override maps take precedence (used for correlated two-qubit tables).
struct StateMoments {
  long n_qubits = 1;
  QubitMoments uniform;
  std::map<long, QubitMoments> special;
  CavityMoments cavity;
  std::map<PairOpKey, Complex> pair_overrides;
  std::map<MixedKey, Complex> mixed_overrides;
  // Allowed deviation of the per-qubit population sum from 1. Nonzero only for
  // perturbative gated-qubit moments, where the upper-state population is a
  // second-order add-on to a normalized lower sector.
  double norm_slack = 0;
  std::vector<std::string> notes;

  const QubitMoments& qubit(long i) const {
    const auto it = special.find(i);
    return it == special.end() ? uniform : it->second;
  }
};

inline Complex sigma_moment(const StateMoments& m, long i, int a, int b) {
  if (i < 0 || i >= m.n_qubits)
    throw std::out_of_range("states: qubit index out of range");
  return m.qubit(i).sigma[a][b];
}

inline Complex cavity_moment(const StateMoments& m, CavOp op) {
  switch (op) {
    case CavOp::One: return 1.0;
    case CavOp::B: return m.cavity.b;
    case CavOp::Bdag: return std::conj(m.cavity.b);
    case CavOp::N: return m.cavity.n;
    case CavOp::BBdag: return m.cavity.n + 1.0;
  }
  return 0.0;
}

// <(|r1><c1|)_g (|r2><c2|)_h>, g != h. Falls back to the product of singles.
inline Complex pair_moment(const StateMoments& m, long g, long h, int r1, int c1, int r2,
                           int c2) {
  if (g == h) throw std::invalid_argument("states: pair moment needs distinct qubits");
  const auto it = m.pair_overrides.find({g, h, r1, c1, r2, c2});
  if (it != m.pair_overrides.end()) return it->second;
  // The adjoint-ordered key may have been stored instead.
  const auto sw = m.pair_overrides.find({h, g, r2, c2, r1, c1});
  if (sw != m.pair_overrides.end()) return sw->second;
  return sigma_moment(m, g, r1, c1) * sigma_moment(m, h, r2, c2);
}

// <(|r><c|)_q  C> for a cavity factor C; product unless overridden.
inline Complex mixed_moment(const StateMoments& m, long q, int r, int c, CavOp op) {
  if (op == CavOp::One) return sigma_moment(m, q, r, c);
  const auto it = m.mixed_overrides.find({q, r, c, op});
  if (it != m.mixed_overrides.end()) return it->second;
  if (op == CavOp::BBdag) {
    const auto n = m.mixed_overrides.find({q, r, c, CavOp::N});
    if (n != m.mixed_overrides.end()) return n->second + sigma_moment(m, q, r, c);
  }
  return sigma_moment(m, q, r, c) * cavity_moment(m, op);
}

inline void validate(const StateMoments& m) {
  auto check_qubit = [&](const QubitMoments& q) {
    double pop = 0;
    for (int a = 0; a < 3; ++a) {
      const Complex d = q.sigma[a][a];
      if (std::abs(d.imag()) > 1e-12)
        throw std::invalid_argument("states: population has imaginary part");
      if (d.real() < -1e-12 || d.real() > 1.0 + 1e-12)
        throw std::invalid_argument("states: population out of [0,1]");
      pop += d.real();
      for (int b = 0; b < 3; ++b)
        if (std::abs(q.sigma[a][b] - std::conj(q.sigma[b][a])) > 1e-12)
          throw std::invalid_argument("states: non-Hermitian qubit moments");
    }
    if (std::abs(pop - 1.0) > 1e-12 + m.norm_slack)
      throw std::invalid_argument("states: qubit populations do not sum to 1");
  };
  check_qubit(m.uniform);
  for (const auto& [idx, q] : m.special) {
    if (idx < 0 || idx >= m.n_qubits)
      throw std::invalid_argument("states: special qubit index out of range");
    check_qubit(q);
  }
  if (m.cavity.n < -1e-12)
    throw std::invalid_argument("states: negative cavity occupation");
}

inline QubitMoments hadamard_qubit() {
  QubitMoments q;
  q.sigma[0][0] = q.sigma[1][1] = 0.5;
  q.sigma[0][1] = q.sigma[1][0] = 0.5;
  return q;
}

inline QubitMoments diagonal_half_qubit() {
  QubitMoments q;
  q.sigma[0][0] = q.sigma[1][1] = 0.5;
  return q;
}

// Product state with every qubit in (|0> + |1>)/sqrt(2), cavity in vacuum.
inline StateMoments hadamard_moments(long n) {
  if (n < 1) throw std::invalid_argument("states: n_qubits >= 1 required");
  StateMoments m;
  m.n_qubits = n;
  m.uniform = hadamard_qubit();
  return m;
}

// (|00..0> + |11..1>)/sqrt(2): every reduced single-qubit state is diagonal.
inline StateMoments ghz_moments(long n) {
  if (n < 2) throw std::invalid_argument("states: GHZ needs n >= 2");
  StateMoments m;
  m.n_qubits = n;
  m.uniform = diagonal_half_qubit();
  // Same-lower-state pair correlations, used only if a caller asks for them.
  // <(|a><a|)_g (|a><a|)_h> = 1/2, cross-population pairs vanish.
  return m;
}

// Moments of the gated qubit during a two-photon resonant Raman pulse with a
// large one-photon detuning. The lower sector is the adiabatic-passage state
// with mixing angle theta and relative phase dphi; the upper-state amplitude
// is the first-order admixture -(omega/detuning) e^{i theta}, so populations
// sum to 1 + (omega/detuning)^2 by construction.
inline QubitMoments gated_qubit_moments(double theta, double dphi, double omega,
                                        double detuning,
                                        std::vector<std::string>* warnings = nullptr) {
  if (detuning == 0) throw std::invalid_argument("states: zero detuning");
  const double r = omega / detuning;
  if (std::abs(r) > 0.2 && warnings)
    warnings->push_back("states: omega/detuning above 0.2, perturbative moments dubious");
  const Complex im(0, 1);
  const double s = std::sin(theta), c = std::cos(theta);
  const Complex eidphi = std::exp(im * dphi);
  QubitMoments q;
  q.sigma[0][0] = c * c;
  q.sigma[1][1] = s * s;
  q.sigma[2][2] = r * r;
  q.sigma[0][1] = im * s * c * eidphi;
  q.sigma[1][0] = std::conj(q.sigma[0][1]);
  // <sigma_+^{a}> = <|2><a|> rows: stored at sigma[2][a].
  q.sigma[2][0] = -r * std::exp(-im * theta) * c;
  q.sigma[0][2] = std::conj(q.sigma[2][0]);
  q.sigma[2][1] = -r * std::exp(-im * theta) * im * s * eidphi;
  q.sigma[1][2] = std::conj(q.sigma[2][1]);
  return q;
}

inline StateMoments one_qubit_gated_moments(double theta, double dphi, double omega,
                                            double detuning) {
  StateMoments m;
  m.n_qubits = 1;
  m.uniform = gated_qubit_moments(theta, dphi, omega, detuning, &m.notes);
  const double r = omega / detuning;
  m.norm_slack = r * r + 1e-12;
  return m;
}

// Full scenario state: one gated qubit, all others idle in the Hadamard state.
inline StateMoments one_qubit_scenario_moments(long n, long gated, double theta, double dphi,
                                               double omega, double detuning) {
  if (gated < 0 || gated >= n) throw std::invalid_argument("states: gated index out of range");
  StateMoments m = hadamard_moments(n);
  m.special[gated] = gated_qubit_moments(theta, dphi, omega, detuning, &m.notes);
  const double r = omega / detuning;
  m.norm_slack = r * r + 1e-12;
  return m;
}

struct PulseShape {
  enum class Kind { Square, SinSq } kind = Kind::Square;
  double omega_max = 0;  // peak Rabi magnitude
  double width = 0;      // pulse duration; Square: on for t in [0, width]
};

// Accumulated mixing angle theta(t) = int_0^t Omega(t')^2 / detuning dt'.
inline double theta_of_t(const PulseShape& pulse, double detuning, double t) {
  if (detuning == 0) throw std::invalid_argument("states: zero detuning");
  if (!(pulse.width > 0) && pulse.kind == PulseShape::Kind::SinSq)
    throw std::invalid_argument("states: sin^2 pulse needs a positive width");
  if (t <= 0) return 0.0;
  switch (pulse.kind) {
    case PulseShape::Kind::Square: {
      const double on = std::min(t, pulse.width > 0 ? pulse.width : t);
      return pulse.omega_max * pulse.omega_max * on / detuning;
    }
    case PulseShape::Kind::SinSq: {
      const double end = std::min(t, pulse.width);
      const double om2 = pulse.omega_max * pulse.omega_max;
      const double w = pulse.width;
      const double val = integrate_rel<double>(
          [&](double tp) {
            const double s = std::sin(M_PI * tp / w);
            return om2 * s * s * s * s / detuning;
          },
          0.0, end, 1e-8);
      return val;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Two-qubit gating moment table. The internal gate dynamics are not modelled;
// the state-dependent factors are inputs with decoherence-free-subspace ideal
// defaults: the four gated-qubit factors are 1 and the cavity stays empty.
// ---------------------------------------------------------------------------

struct MomentAssignment {
  std::string label;
  Complex value;
};

// Accepted labels (g, h are qubit indices, a b c d in {0,1,2}):
//   q<g>.s<ab>              <(|a><b|)_g>
//   pair.q<g>.s<ab>.q<h>.s<cd>   <(|a><b|)_g (|c><d|)_h>
//   cavity.n | cavity.b
//   mixed.q<g>.s<ab>.<n|b|bdag>  <(|a><b|)_g  C>
inline StateMoments two_qubit_moment_table(long n, long control, long target,
                                           const std::vector<MomentAssignment>& input = {}) {
  if (n < 2) throw std::invalid_argument("states: two-qubit table needs n >= 2");
  if (control == target || control < 0 || target < 0 || control >= n || target >= n)
    throw std::invalid_argument("states: bad control/target indices");
  StateMoments m;
  m.n_qubits = n;
  m.uniform = hadamard_qubit();  // idle qubits

  QubitMoments ctrl;  // control fully in |1>, target fully in |0>
  ctrl.sigma[1][1] = 1.0;
  QubitMoments tgt;
  tgt.sigma[0][0] = 1.0;
  m.special[control] = ctrl;
  m.special[target] = tgt;

  // Gated-pair transition factors default to 1.
  m.pair_overrides[{control, target, 1, 2, 2, 0}] = 1.0;
  m.pair_overrides[{target, control, 0, 2, 2, 1}] = 1.0;

  auto parse_sigma = [](const std::string& tok) -> std::pair<int, int> {
    if (tok.size() != 3 || tok[0] != 's') throw std::invalid_argument("states: bad op '" + tok + "'");
    const int a = tok[1] - '0', b = tok[2] - '0';
    if (a < 0 || a > 2 || b < 0 || b > 2)
      throw std::invalid_argument("states: bad op '" + tok + "'");
    return {a, b};
  };
  auto parse_qubit = [&](const std::string& tok) -> long {
    if (tok.size() < 2 || tok[0] != 'q') throw std::invalid_argument("states: bad qubit '" + tok + "'");
    const long q = std::stol(tok.substr(1));
    if (q < 0 || q >= n) throw std::invalid_argument("states: qubit index out of range");
    return q;
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
      if (ch == '.') {
        parts.push_back(cur);
        cur.clear();
      } else
        cur += ch;
    }
    parts.push_back(cur);
    return parts;
  };

  for (const auto& [label, value] : input) {
    const auto parts = split(label);
    if (parts.size() == 2 && parts[0] == "cavity") {
      if (parts[1] == "n") {
        if (std::abs(value.imag()) > 1e-12 || value.real() < 0)
          throw std::invalid_argument("states: cavity.n must be real >= 0");
        m.cavity.n = value.real();
      } else if (parts[1] == "b")
        m.cavity.b = value;
      else
        throw std::invalid_argument("states: unknown cavity moment '" + label + "'");
    } else if (parts.size() == 2 && parts[0][0] == 'q') {
      const long q = parse_qubit(parts[0]);
      const auto [a, b] = parse_sigma(parts[1]);
      QubitMoments qm = m.qubit(q);
      qm.sigma[a][b] = value;
      qm.sigma[b][a] = std::conj(value);
      m.special[q] = qm;
    } else if (parts.size() == 5 && parts[0] == "pair") {
      const long g = parse_qubit(parts[1]);
      const auto [a, b] = parse_sigma(parts[2]);
      const long h = parse_qubit(parts[3]);
      const auto [c, d] = parse_sigma(parts[4]);
      m.pair_overrides[{g, h, a, b, c, d}] = value;
    } else if (parts.size() == 4 && parts[0] == "mixed") {
      const long q = parse_qubit(parts[1]);
      const auto [a, b] = parse_sigma(parts[2]);
      CavOp op;
      if (parts[3] == "n")
        op = CavOp::N;
      else if (parts[3] == "b")
        op = CavOp::B;
      else if (parts[3] == "bdag")
        op = CavOp::Bdag;
      else
        throw std::invalid_argument("states: unknown cavity factor '" + parts[3] + "'");
      m.mixed_overrides[{q, a, b, op}] = value;
    } else {
      throw std::invalid_argument("states: unknown moment label '" + label + "'");
    }
  }

  validate(m);
  return m;
}

inline std::vector<MomentAssignment> parse_moment_table(const std::string& text) {
  std::vector<MomentAssignment> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string label;
    double re, im;
    if (!(ls >> label)) continue;
    if (!(ls >> re >> im))
      throw std::invalid_argument("states: moment line needs 'label re im': " + line);
    out.push_back({label, Complex(re, im)});
  }
  return out;
}

}  // namespace decoq
