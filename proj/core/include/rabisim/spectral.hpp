// spectral.hpp: two-time correlations by the quantum regression theorem, the
// cavity emission spectrum, dressed states and spectral-line assignment.
//
// Conventions: C(tau) = <a†(tau) a> (the steady-state field amplitude vanishes),
// S(nu) = ∫ C(tau) exp(-i nu tau) dtau = 2 Re ∫_0^∞ C(tau) exp(-i nu tau) dtau.
// An emission taking dressed state i to f appears at nu = E_i - E_f.

#pragma once

#include "rabisim/correlation.hpp"
#include "rabisim/hilbert.hpp"
#include "rabisim/model.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabisim {

// Normalised correlations are undefined when <a†a> < 1e-14.
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// C(tau) never decayed below the required fraction of C(0) within the point budget.
class SpectrumWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// g2(tau) = Tr[a†a exp(L tau)(a rho a†)] / <a†a>^2 on an increasing grid of tau >= 0.
CorrelationTrace g2_tau(const ModelParams& params, std::span<const double> tau_grid,
                        const SpaceSpec& space = make_space());

// C(tau) = Tr[a† exp(L tau)(a rho)].
CorrelationTrace field_correlation(const ModelParams& params, std::span<const double> tau_grid,
                                   const SpaceSpec& space = make_space());

// <a(tau)... > mirror branch: C(-tau) = Tr[a exp(L tau)(rho a†)], equal to conj C(tau).
CorrelationTrace field_correlation_reversed(const ModelParams& params, std::span<const double> tau_grid,
                                            const SpaceSpec& space = make_space());

struct SpectrumOptions {
  // The tau window grows until |C| over a block of samples stays below
  // decay_target * C(0). Windows that cannot reach required_decay are refused.
  double decay_target = 1e-8;
  double required_decay = 1e-2;
  std::size_t max_points = std::size_t{1} << 22;
};

struct Spectrum {
  std::vector<double> nu;
  std::vector<double> s;
  double photon_number = 0.0;  // C(0)
  double tau_step = 0.0;
  std::size_t tau_points = 0;
  double tau_window = 0.0;
  double window_decay = 0.0;  // max |C| / C(0) over the last block of samples
  std::vector<std::string> warnings;
};

// A uniform nu grid is transformed with a chirp-z (Bluestein) FFT, any other
// grid by direct summation. When <a†a> < 1e-14 the spectrum is identically zero
// and carries a warning.
Spectrum emission_spectrum(const ModelParams& params, std::span<const double> nu_grid,
                           const SpectrumOptions& options = {}, const SpaceSpec& space = make_space());

// Cross-check: the full two-sided sum with the negative-tau branch propagated
// independently. Returns complex S(nu); its imaginary part measures asymmetry.
std::vector<cplx> emission_spectrum_two_sided(const ModelParams& params, std::span<const double> nu_grid,
                                              const SpectrumOptions& options = {},
                                              const SpaceSpec& space = make_space());

// (1/2π) ∫ S dnu by the trapezoid rule over the spectrum's own grid.
double spectrum_integral(const Spectrum& spectrum);

// Trapezoid sum 2 Re[h (C0/2 + Σ_k C_k exp(-i nu k h))] of uniformly sampled C.
std::vector<double> one_sided_transform(std::span<const cplx> c, double h, std::span<const double> nu_grid);

struct Peak {
  std::size_t index = 0;  // grid index of the local maximum
  double nu = 0.0;        // parabolically refined position
  double height = 0.0;
  std::optional<double> fwhm;  // half-maximum crossings interpolated linearly
};

// Local maxima above rel_threshold * max(S).
std::vector<Peak> find_peaks(const Spectrum& spectrum, double rel_threshold = 0.01);

enum class DressedName { psi1_plus = 0, psi1_minus = 1, psi2_plus = 2, psi2_minus = 3 };

std::string to_string(DressedName name);

struct DressedLabel {
  int n = 0;
  Qubit s = Qubit::g;
  double weight = 0.0;  // |<n,s|psi>|^2, summed over both members for a doublet
  // Set when the two largest bare weights are within 1e-3: the state is a doublet
  // member (for example (|0,g> ± |1,e>)/√2) rather than one bare state.
  std::optional<std::pair<int, Qubit>> partner;
};

struct DressedStateSet {
  SpaceSpec space;
  std::vector<double> energies;   // ascending
  std::vector<StateVector> states;
  std::vector<int> manifolds;     // 1 or 2 per state
  std::vector<std::optional<DressedLabel>> labels;
  std::vector<std::pair<int, int>> degenerate_pairs;  // |E_i - E_j| < 1e-10 omega0
  // Indices into states of psi1+, psi1-, psi2+, psi2-: in each manifold the two
  // eigenstates with the largest weight on its zero- and one-photon bare states,
  // the higher energy one being "+".
  std::array<int, 4> named{};
  // transition_amplitudes(f, i) = |<psi_f| a |psi_i>| with rows and columns in DressedName order.
  Eigen::Matrix4d transition_amplitudes = Eigen::Matrix4d::Zero();

  int index(DressedName name) const { return named[static_cast<std::size_t>(name)]; }
  double energy(DressedName name) const { return energies[static_cast<std::size_t>(index(name))]; }
  const StateVector& state(DressedName name) const { return states[static_cast<std::size_t>(index(name))]; }
};

// Diagonalises H separately in each manifold, so every eigenstate belongs to one manifold.
DressedStateSet dressed_states(const ModelParams& params, const SpaceSpec& space = make_space());

struct LineAssignment {
  Peak peak;
  bool matched = false;
  DressedName from = DressedName::psi1_minus;
  DressedName to = DressedName::psi2_minus;
  double transition_nu = 0.0;  // E_from - E_to
  double amplitude = 0.0;      // |<to| a |from>|
  double mismatch = 0.0;       // |peak.nu - transition_nu|
};

// Pairs each detected peak with the nearest transition among the four named
// dressed states. Peaks farther than tolerance from every transition are kept
// with matched = false. A nonpositive tolerance selects 4 kappa.
std::vector<LineAssignment> assign_lines(const DressedStateSet& dressed, const Spectrum& spectrum,
                                         const ModelParams& params, double tolerance = 0.0,
                                         double rel_threshold = 0.01);

}  // namespace rabisim
