#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hypcircle/hyp_plane.hpp"
#include "hypcircle/sl2.hpp"

namespace hypcircle {

/// A defining relation: the generator word (indices into generators, negative
/// k meaning the inverse of generator -k-1) must evaluate to +-identity.
struct Relation {
    std::vector<int> word;
};

/// Cocompact lattice given by generator matrices. Construction precomputes
/// Dirichlet-domain data at the base point i: the neighbor (side-pairing
/// candidate) elements, covering radius, a diameter estimate, and a point of
/// the domain far from all cone points (used to center bump observables).
struct FuchsianGroup {
    std::string name;
    std::vector<SL2> generators;
    std::vector<Relation> relations;
    double covol_surface = 0.0;   // hyperbolic area of Gamma \ H
    int stabilizer_order = 1;     // order of the projective stabilizer of i
    bool minus_identity = true;   // whether -I lies in the matrix group

    // Dirichlet data at i (filled by finalize()).
    std::vector<SL2> neighbors;        // one representative per nearby coset, gamma.i != i
    std::vector<HPoint> neighbor_pts;  // gamma.i for each neighbor
    std::vector<SL2> bfs_steps;        // extended step set for orbit BFS
    double covering_radius = 0.0;      // max distance from i to the domain boundary
    double domain_diameter = 0.0;
    double min_displacement_i = 0.0;   // min over neighbors of d(gamma.i, i)
    HPoint deep_point;                 // interior point maximizing min displacement
    double deep_point_displacement = 0.0;

    /// Covolume of the matrix group in SL2(R) for the Haar normalization
    /// m_G = m_K(prob) x m_H; equals covol_surface / 2 when -I is present.
    double covol_group() const { return covol_surface / (minus_identity ? 2.0 : 1.0); }

    /// 1 / |Gamma intersect SO2| (matrix count at base point i).
    double covol_K() const {
        return 1.0 / (static_cast<double>(stabilizer_order) * (minus_identity ? 2.0 : 1.0));
    }

    /// covol_K / covol_group; the lattice counting main term is this times
    /// ball_area(R). Depends only on projective data.
    double counting_ratio() const { return covol_K() / covol_group(); }

    double max_relation_error() const;

    /// Dirichlet membership: d(z, i) <= d(z, gamma.i) for all neighbors.
    bool in_domain(const HPoint& z, double tol = 1e-12) const;

    /// Moves z into the Dirichlet domain, returning the reduced point and the
    /// group element gamma with gamma.z = reduced.
    std::pair<HPoint, SL2> reduce(const HPoint& z) const;

    /// Minimal displacement of the orbit at z: min d(gamma.z, z) over group
    /// elements with gamma.z != z (searched among elements near the domain).
    double min_displacement(const HPoint& z) const;

    void finalize();
};

FuchsianGroup triangle_group(int p, int q, int r);

/// "triangle:p,q,r" or a path to a group file.
FuchsianGroup group_from_preset(const std::string& spec);

/// Text format: lines "gen a b c d" (row-major), "rel i j k ..." (1-based,
/// negative for inverses), "covol <area>", "stab <order>", "name <str>",
/// "minus_identity <0|1>". Blank lines and '#' comments ignored.
FuchsianGroup load_group_file(const std::string& path);

struct OrbitBallOptions {
    double margin = -1.0;       // < 0: use 2 x domain_diameter
    double dedup_tol = 1e-9;    // in disc-model coordinates
    std::size_t visited_cap = 20'000'000;
};

/// Orbit points of Gamma.base within distance R of base, with one group
/// element per point. `valid` is false when the visit cap was hit, in which
/// case counts must not be trusted.
struct OrbitBall {
    double radius = 0.0;
    double dedup_tol = 1e-9;
    bool valid = false;
    std::size_t visited = 0;
    std::vector<HPoint> points;
    std::vector<SL2> elements;
    std::vector<double> cosh_dist;         // cosh d(point, base), parallel to points
    std::vector<double> sorted_cosh_dist;  // ascending, for radius counting

    long long count_within(double R) const;
};

OrbitBall enumerate_orbit_ball(const FuchsianGroup& G, const HPoint& base, double R,
                               const OrbitBallOptions& opts = {});

/// Independent oracle: exhaustive breadth-first word enumeration over the raw
/// generators with element-level dedup, no geometric pruning beyond a generous
/// radius. Returns the sorted cosh-distances of the orbit points within R.
/// Exponential in R; intended for R <= ~4.
std::vector<double> brute_force_orbit(const FuchsianGroup& G, const HPoint& base,
                                      double R, int max_layers = 64,
                                      std::size_t element_cap = 6'000'000);

/// n Haar-distributed points on Gamma \ SL2(R): rejection sampling of
/// dx dy / y^2 over the Dirichlet domain, uniform fiber angle. Sample k is
/// drawn from substream(seed, k), so results do not depend on worker layout.
std::vector<SL2> sample_quotient(const FuchsianGroup& G, int n, std::uint64_t seed);

/// All group elements gamma (matrices, both signs, full point fibers) with
/// d(gamma.z0, i) <= R. Meant for small R: local support lists of bumps.
std::vector<SL2> orbit_elements_near(const FuchsianGroup& G, const HPoint& z0, double R);

}  // namespace hypcircle
