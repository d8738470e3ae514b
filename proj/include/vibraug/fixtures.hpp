#pragma once

#include <Eigen/Core>
#include <memory>
#include <span>
#include <string_view>

#include "vibraug/chemio.hpp"
#include "vibraug/error.hpp"
#include "vibraug/rng.hpp"

// Built-in molecules with normal-mode data, plus small deterministic toy
// regression sets. The same texts are committed under data/fixtures/; a test
// guards against drift between the two copies.

namespace vibraug::fixtures {

inline constexpr const char* k_nitrogen_xyz = R"FIX(2
nitrogen
N 0.000000 0.000000 0.549000
N 0.000000 0.000000 -0.549000
)FIX";
inline constexpr const char* k_nitrogen_modes = R"FIX(MODES 1 2
MODE 1 2358.6 7.0035 22.9548
0.000000 0.000000 0.707107
0.000000 0.000000 -0.707107
)FIX";
inline constexpr const char* k_water_xyz = R"FIX(3
water
O 0.000000 0.000000 0.117300
H 0.000000 0.757200 -0.469200
H 0.000000 -0.757200 -0.469200
)FIX";
inline constexpr const char* k_water_modes = R"FIX(MODES 3 3
MODE 1 1594.7 1.0827 1.6222
0.000000 0.000000 -0.068260
0.000000 -0.417712 0.568496
0.000000 0.417712 0.568496
MODE 2 3656.9 1.0453 8.2360
0.000000 0.000000 -0.050078
0.000000 0.580901 0.401623
0.000000 -0.580901 0.401623
MODE 3 3755.9 1.0810 8.9847
0.000000 -0.070349 0.000000
0.000000 0.552745 -0.438176
0.000000 0.552745 0.438176
)FIX";
inline constexpr const char* k_aromatic_amine_xyz = R"FIX(14
aromatic_amine
C 1.400000 0.000000 0.000000
C 0.700000 1.212436 0.000000
C -0.700000 1.212436 0.000000
C -1.400000 0.000000 0.000000
C -0.700000 -1.212436 0.000000
C 0.700000 -1.212436 0.000000
N 2.800000 0.000000 0.100000
H 1.240000 2.147743 0.000000
H -1.240000 2.147743 0.000000
H -2.480000 0.000000 0.000000
H -1.240000 -2.147743 0.000000
H 1.240000 -2.147743 0.000000
H 3.320000 0.810000 0.330000
H 3.320000 -0.810000 0.330000
)FIX";
inline constexpr const char* k_aromatic_amine_modes = R"FIX(MODES 4 14
MODE 1 995.0 6.5000 3.7915
0.259463 0.000000 0.000000
0.129732 0.224702 0.000000
-0.129732 0.224702 0.000000
-0.259463 0.000000 0.000000
-0.129732 -0.224702 0.000000
0.129732 -0.224702 0.000000
0.216219 0.000000 0.000000
0.162165 0.280877 0.000000
-0.162165 0.280877 0.000000
-0.324329 0.000000 0.000000
-0.162165 -0.280877 0.000000
0.162165 -0.280877 0.000000
0.108110 0.000000 0.000000
0.108110 0.000000 0.000000
MODE 2 1618.0 1.1500 1.7738
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
-0.162213 0.000000 -0.050692
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.223043 -0.648852 -0.121660
0.223043 0.648852 -0.121660
MODE 3 3052.0 1.0900 5.9820
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.223607 0.387298 0.000000
-0.223607 0.387298 0.000000
-0.447214 0.000000 0.000000
-0.223607 -0.387298 0.000000
0.223607 -0.387298 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
MODE 4 688.0 3.2000 0.8924
0.000000 0.000000 0.244998
0.000000 0.000000 -0.244998
0.000000 0.000000 0.244998
0.000000 0.000000 -0.244998
0.000000 0.000000 0.244998
0.000000 0.000000 -0.244998
0.000000 0.000000 -0.146999
0.000000 0.000000 -0.342997
0.000000 0.000000 0.342997
0.000000 0.000000 -0.342997
0.000000 0.000000 0.342997
0.000000 0.000000 -0.342997
0.000000 0.000000 0.122499
0.000000 0.000000 0.122499
)FIX";
inline constexpr const char* k_acyl_chloride_xyz = R"FIX(4
acyl_chloride
C 0.000000 0.000000 0.000000
O 0.000000 0.000000 1.179000
Cl 1.441000 0.000000 -0.977000
Cl -1.441000 0.000000 -0.977000
)FIX";
inline constexpr const char* k_acyl_chloride_modes = R"FIX(MODES 3 4
MODE 1 1827.0 6.8600 13.4912
0.000000 0.000000 -0.632884
0.000000 0.000000 0.765585
0.000000 0.000000 0.081662
0.000000 0.000000 0.081662
MODE 2 569.0 21.9000 4.1775
0.000000 0.000000 0.537562
0.000000 0.000000 0.070732
0.491773 0.000000 -0.333423
-0.491773 0.000000 -0.333423
MODE 3 285.0 19.4000 0.9284
0.000000 0.000000 -0.229175
0.000000 0.000000 0.045835
0.385823 0.000000 0.569060
0.385823 0.000000 -0.569060
)FIX";
inline constexpr const char* k_chain55_xyz = R"FIX(55
chain55
C 0.000000 0.440000 0.000000
C 1.260000 -0.440000 0.000000
C 2.520000 0.440000 0.000000
C 3.780000 -0.440000 0.000000
C 5.040000 0.440000 0.000000
C 6.300000 -0.440000 0.000000
C 7.560000 0.440000 0.000000
C 8.820000 -0.440000 0.000000
C 10.080000 0.440000 0.000000
C 11.340000 -0.440000 0.000000
C 12.600000 0.440000 0.000000
C 13.860000 -0.440000 0.000000
C 15.120000 0.440000 0.000000
C 16.380000 -0.440000 0.000000
C 17.640000 0.440000 0.000000
C 18.900000 -0.440000 0.000000
C 20.160000 0.440000 0.000000
C 21.420000 -0.440000 0.000000
O -0.750000 1.350000 0.000000
H -0.600000 -0.410000 0.000000
H 1.260000 -0.750000 0.885000
H 1.260000 -0.750000 -0.885000
H 2.520000 0.750000 0.885000
H 2.520000 0.750000 -0.885000
H 3.780000 -0.750000 0.885000
H 3.780000 -0.750000 -0.885000
H 5.040000 0.750000 0.885000
H 5.040000 0.750000 -0.885000
H 6.300000 -0.750000 0.885000
H 6.300000 -0.750000 -0.885000
H 7.560000 0.750000 0.885000
H 7.560000 0.750000 -0.885000
H 8.820000 -0.750000 0.885000
H 8.820000 -0.750000 -0.885000
H 10.080000 0.750000 0.885000
H 10.080000 0.750000 -0.885000
H 11.340000 -0.750000 0.885000
H 11.340000 -0.750000 -0.885000
H 12.600000 0.750000 0.885000
H 12.600000 0.750000 -0.885000
H 13.860000 -0.750000 0.885000
H 13.860000 -0.750000 -0.885000
H 15.120000 0.750000 0.885000
H 15.120000 0.750000 -0.885000
H 16.380000 -0.750000 0.885000
H 16.380000 -0.750000 -0.885000
H 17.640000 0.750000 0.885000
H 17.640000 0.750000 -0.885000
H 18.900000 -0.750000 0.885000
H 18.900000 -0.750000 -0.885000
H 20.160000 0.750000 0.885000
H 20.160000 0.750000 -0.885000
H 21.420000 -0.750000 0.885000
H 21.420000 -0.750000 -0.885000
H 22.370000 -0.080000 0.000000
)FIX";
inline constexpr const char* k_chain55_modes = R"FIX(MODES 2 55
MODE 1 1728.0 7.2000 12.6669
0.403105 -0.489101 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
-0.487627 0.591655 0.000000
-0.065017 0.078887 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
0.000000 0.000000 0.000000
MODE 2 120.0 8.0000 0.0679
-0.219205 0.000000 0.000000
-0.193860 0.000000 0.000000
-0.168514 0.000000 0.000000
-0.143169 0.000000 0.000000
-0.117824 0.000000 0.000000
-0.092479 0.000000 0.000000
-0.067134 0.000000 0.000000
-0.041788 0.000000 0.000000
-0.016443 0.000000 0.000000
0.008902 0.000000 0.000000
0.034247 0.000000 0.000000
0.059592 0.000000 0.000000
0.084937 0.000000 0.000000
0.110283 0.000000 0.000000
0.135628 0.000000 0.000000
0.160973 0.000000 0.000000
0.186318 0.000000 0.000000
0.211663 0.000000 0.000000
-0.234291 0.000000 0.000000
-0.231274 0.000000 0.000000
-0.193860 0.000000 0.000000
-0.193860 0.000000 0.000000
-0.168514 0.000000 0.000000
-0.168514 0.000000 0.000000
-0.143169 0.000000 0.000000
-0.143169 0.000000 0.000000
-0.117824 0.000000 0.000000
-0.117824 0.000000 0.000000
-0.092479 0.000000 0.000000
-0.092479 0.000000 0.000000
-0.067134 0.000000 0.000000
-0.067134 0.000000 0.000000
-0.041788 0.000000 0.000000
-0.041788 0.000000 0.000000
-0.016443 0.000000 0.000000
-0.016443 0.000000 0.000000
0.008902 0.000000 0.000000
0.008902 0.000000 0.000000
0.034247 0.000000 0.000000
0.034247 0.000000 0.000000
0.059592 0.000000 0.000000
0.059592 0.000000 0.000000
0.084937 0.000000 0.000000
0.084937 0.000000 0.000000
0.110283 0.000000 0.000000
0.110283 0.000000 0.000000
0.135628 0.000000 0.000000
0.135628 0.000000 0.000000
0.160973 0.000000 0.000000
0.160973 0.000000 0.000000
0.186318 0.000000 0.000000
0.186318 0.000000 0.000000
0.211663 0.000000 0.000000
0.211663 0.000000 0.000000
0.230773 0.000000 0.000000
)FIX";
inline constexpr const char* k_diamine17_xyz = R"FIX(17
diamine17
C 0.000000 1.200000 0.050000
C -1.141268 0.370820 0.050000
C -0.705342 -0.970820 -0.060000
C 0.705342 -0.970820 0.080000
C 1.141268 0.370820 -0.080000
N -1.485342 -0.020820 0.550000
N -0.244658 -1.750820 0.550000
H 0.550000 2.050000 0.350000
H -1.491268 1.320820 0.350000
H -0.455342 -1.320820 -1.020000
H 1.105342 -0.870820 1.050000
H 2.091268 0.020820 0.450000
H 0.991268 -0.229180 -0.950000
H -1.685342 0.529180 1.300000
H -2.335342 0.599180 0.050000
H 0.105342 -2.500820 1.200000
H -1.144658 -2.300820 0.150000
)FIX";

struct Fixture {
  const char* name;
  const char* xyz;
  const char* modes;  // nullptr when only geometry is defined
};

inline constexpr Fixture kFixtures[] = {
    {"nitrogen", k_nitrogen_xyz, k_nitrogen_modes},
    {"water", k_water_xyz, k_water_modes},
    {"aromatic_amine", k_aromatic_amine_xyz, k_aromatic_amine_modes},
    {"acyl_chloride", k_acyl_chloride_xyz, k_acyl_chloride_modes},
    {"chain55", k_chain55_xyz, k_chain55_modes},
    {"diamine17", k_diamine17_xyz, nullptr},
};

inline std::span<const Fixture> library() { return kFixtures; }

inline const Fixture& get(std::string_view name) {
  for (const auto& f : kFixtures)
    if (name == f.name) return f;
  throw Error("unknown fixture '" + std::string(name) + "'");
}

inline chemio::Molecule molecule(std::string_view name) {
  return chemio::parse_xyz(get(name).xyz);
}

inline std::shared_ptr<const chemio::ModeSet> modes(std::string_view name) {
  const Fixture& f = get(name);
  if (!f.modes) throw Error("fixture '" + std::string(name) + "' has no mode data");
  auto mol = chemio::parse_xyz(f.xyz);
  return std::make_shared<const chemio::ModeSet>(chemio::parse_modes(f.modes, mol));
}

// Monomer pools the synthetic benchmark draws from.
inline constexpr const char* kAminePool[] = {"aromatic_amine", "water", "nitrogen"};
inline constexpr const char* kAcylPool[] = {"acyl_chloride", "nitrogen", "water"};

// y = w.x + 0.3 with standard normal features; exercised by optimizer tests.
inline void linear_toy(int n, int dims, std::uint64_t seed, Eigen::MatrixXd& x,
                       Eigen::VectorXd& y) {
  RngStream rng(seed, streams::toy);
  Eigen::VectorXd w(dims);
  for (int d = 0; d < dims; ++d) w[d] = rng.uniform(-1.0, 1.0);
  x.resize(n, dims);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dims; ++d) x(i, d) = rng.normal(0.0, 1.0);
    y[i] = x.row(i).dot(w) + 0.3;
  }
}

// Piecewise-constant 1-d target: y = 1 for x <= 2.5, else 3. The optimal
// single split sits exactly at 2.5.
inline void step_toy(Eigen::MatrixXd& x, Eigen::VectorXd& y) {
  x.resize(4, 1);
  x << 1.0, 2.0, 3.0, 4.0;
  y.resize(4);
  y << 1.0, 1.0, 3.0, 3.0;
}

}  // namespace vibraug::fixtures
