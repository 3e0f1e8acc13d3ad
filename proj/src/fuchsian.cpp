#include "hypcircle/fuchsian.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hypcircle/rng.hpp"

namespace hypcircle {

namespace {

// Disc-model coordinates (z - i)/(z + i); equalizes scales for deduplication.
inline void disc_coords(const HPoint& z, double& wx, double& wy) {
    const double den = z.x * z.x + (z.y + 1.0) * (z.y + 1.0);
    wx = (z.x * z.x + z.y * z.y - 1.0) / den;
    wy = -2.0 * z.x / den;
}

// Hashed grid over the disc with true-distance probing of the 3x3 cell
// neighborhood, so points within tol of a cell edge cannot be double counted.
class PointDedup {
public:
    explicit PointDedup(double tol, std::size_t expected = 1024)
        : tol_(tol), inv_(1.0 / tol) {
        cells_.reserve(2 * expected);
        xs_.reserve(expected);
        ys_.reserve(expected);
        next_.reserve(expected);
    }

    bool insert(double wx, double wy) {
        const auto [qx, qy] = quant(wx, wy);
        // revisits land in the home cell almost always; probe it first
        if (hit(qx, qy, wx, wy)) return false;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                if (dx == 0 && dy == 0) continue;
                if (hit(qx + dx, qy + dy, wx, wy)) return false;
            }
        const int32_t idx = static_cast<int32_t>(xs_.size());
        xs_.push_back(wx);
        ys_.push_back(wy);
        auto [it, fresh] = cells_.emplace(key(qx, qy), idx);
        if (fresh) {
            next_.push_back(-1);
        } else {
            next_.push_back(it->second);
            it->second = idx;
        }
        return true;
    }

    std::size_t size() const { return xs_.size(); }

private:
    bool hit(uint32_t qx, uint32_t qy, double wx, double wy) const {
        auto it = cells_.find(key(qx, qy));
        if (it == cells_.end()) return false;
        for (int32_t j = it->second; j >= 0; j = next_[j]) {
            const double ex = xs_[j] - wx, ey = ys_[j] - wy;
            if (ex * ex + ey * ey <= tol_ * tol_) return true;
        }
        return false;
    }

    std::pair<uint32_t, uint32_t> quant(double wx, double wy) const {
        return {static_cast<uint32_t>((wx + 1.0) * inv_),
                static_cast<uint32_t>((wy + 1.0) * inv_)};
    }
    static uint64_t key(uint32_t qx, uint32_t qy) {
        return (static_cast<uint64_t>(qx) << 32) | qy;
    }

    double tol_, inv_;
    std::unordered_map<uint64_t, int32_t> cells_;
    std::vector<double> xs_, ys_;
    std::vector<int32_t> next_;
};

struct QuantElem {
    int64_t q[4];
    bool operator==(const QuantElem& o) const {
        return q[0] == o.q[0] && q[1] == o.q[1] && q[2] == o.q[2] && q[3] == o.q[3];
    }
};

struct QuantElemHash {
    std::size_t operator()(const QuantElem& e) const {
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (int i = 0; i < 4; ++i) {
            h ^= static_cast<uint64_t>(e.q[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

class ElementDedup {
public:
    explicit ElementDedup(double res = 1e-7) : res_(res) {}

    // Inserts g and -g; returns true when the element was genuinely new.
    bool insert(const SL2& g) {
        QuantElem plus = quant(g), minus = quant(-g);
        if (seen_.count(plus) || seen_.count(minus)) return false;
        seen_.insert(plus);
        seen_.insert(minus);
        return true;
    }

    std::size_t size() const { return seen_.size() / 2; }

private:
    QuantElem quant(const SL2& g) const {
        return {{llround(g.a / res_), llround(g.b / res_), llround(g.c / res_),
                 llround(g.d / res_)}};
    }
    double res_;
    std::unordered_set<QuantElem, QuantElemHash> seen_;
};

SL2 rotation_about(const HPoint& c, double phi) {
    const SL2 t = iwasawa(c.x, c.y, 0.0);
    return t * rotation(phi) * t.inverse();
}

SL2 evaluate_word(const std::vector<SL2>& gens, const std::vector<int>& word) {
    SL2 g;
    for (int k : word) {
        if (k >= 0)
            g = g * gens[static_cast<std::size_t>(k)];
        else
            g = g * gens[static_cast<std::size_t>(-k - 1)].inverse();
    }
    return g;
}

// Distance from i along direction phi to the bisector of i and w; infinity
// (returned as a large sentinel) when the ray never crosses it.
double bisector_crossing(double phi, const Polar& w) {
    const double cr = w.cosh_r;
    const double sr = std::sqrt(std::max(0.0, cr * cr - 1.0));
    const double cs = std::cos(phi - w.psi);
    if (sr * cs <= 0.0) return 1e9;
    const double th = (cr - 1.0) / (sr * cs);
    if (th >= 1.0) return 1e9;
    return std::atanh(th);
}

}  // namespace

double FuchsianGroup::max_relation_error() const {
    double worst = 0.0;
    for (const auto& rel : relations) {
        const SL2 g = evaluate_word(generators, rel.word);
        worst = std::max(worst, g.projective_diff(SL2()));
    }
    return worst;
}

bool FuchsianGroup::in_domain(const HPoint& z, double tol) const {
    const double ci = cosh_dist(z, point_i());
    for (const auto& pt : neighbor_pts)
        if (cosh_dist(z, pt) < ci - tol) return false;
    return true;
}

std::pair<HPoint, SL2> FuchsianGroup::reduce(const HPoint& z) const {
    HPoint cur = z;
    SL2 acc;
    for (int iter = 0; iter < 4096; ++iter) {
        double best = cosh_dist(cur, point_i());
        int best_j = -1;
        for (std::size_t j = 0; j < neighbors.size(); ++j) {
            const double c = cosh_dist(cur, neighbor_pts[j]);
            if (c < best * (1.0 - 1e-15)) {
                best = c;
                best_j = static_cast<int>(j);
            }
        }
        if (best_j < 0) return {cur, acc};
        // d(z, gamma.i) < d(z, i) means gamma^{-1} pulls z strictly closer to i.
        const SL2 step = neighbors[static_cast<std::size_t>(best_j)].inverse();
        cur = mobius(step, cur);
        acc = step * acc;
    }
    throw std::runtime_error("FuchsianGroup::reduce did not terminate; neighbor list incomplete?");
}

double FuchsianGroup::min_displacement(const HPoint& z) const {
    const auto elems = orbit_elements_near(*this, z, 2.5 + hyp_dist(z, point_i()));
    double best = 1e9;
    for (const auto& g : elems) {
        const HPoint w = mobius(g, z);
        const double d = hyp_dist(w, z);
        if (d > 1e-9) best = std::min(best, d);
    }
    return best;
}

void FuchsianGroup::finalize() {
    // Bootstrap: exhaustive element BFS over the raw generators out to a
    // generous radius around i. Small for any reasonable lattice.
    std::vector<SL2> steps;
    for (const auto& g : generators) {
        steps.push_back(g);
        steps.push_back(g.inverse());
    }
    const double boot_radius = 5.0;
    const double boot_cosh = std::cosh(boot_radius);
    ElementDedup seen;
    std::deque<SL2> queue;
    std::vector<SL2> elems;
    seen.insert(SL2());
    queue.push_back(SL2());
    elems.push_back(SL2());
    while (!queue.empty()) {
        const SL2 g = queue.front();
        queue.pop_front();
        for (const auto& s : steps) {
            const SL2 h = g * s;
            if (cosh_dist(mobius(h, point_i()), point_i()) > boot_cosh) continue;
            if (!seen.insert(h)) continue;
            queue.push_back(h);
            elems.push_back(h);
        }
        if (elems.size() > 200000)
            throw std::runtime_error("finalize: bootstrap enumeration exploded");
    }

    // Orbit points of i near i, one representative element per point.
    std::vector<SL2> reps;
    std::vector<HPoint> rep_pts;
    std::vector<SL2> stab;  // elements fixing i (projective stabilizer reps)
    {
        PointDedup dd(1e-9);
        for (const auto& g : elems) {
            const HPoint w = mobius(g, point_i());
            double wx, wy;
            disc_coords(w, wx, wy);
            if (hyp_dist(w, point_i()) <= 1e-9) {
                if (g.projective_diff(SL2()) > 1e-9) stab.push_back(g);
                continue;
            }
            if (dd.insert(wx, wy)) {
                reps.push_back(g);
                rep_pts.push_back(w);
            }
        }
    }
    if (reps.empty()) throw std::runtime_error("finalize: no nontrivial orbit points found");

    std::vector<Polar> rep_polar(rep_pts.size());
    for (std::size_t j = 0; j < rep_pts.size(); ++j) rep_polar[j] = polar_from_i(rep_pts[j]);

    // Directional boundary of the Dirichlet domain; covering radius and a
    // diameter estimate from sampled boundary points.
    const int ndir = 1024;
    std::vector<HPoint> boundary;
    covering_radius = 0.0;
    for (int k = 0; k < ndir; ++k) {
        const double phi = 2.0 * pi * (k + 0.5) / ndir;
        double t = 1e9;
        for (const auto& w : rep_polar) t = std::min(t, bisector_crossing(phi, w));
        if (t > 1e8)
            throw std::runtime_error("finalize: Dirichlet domain appears unbounded (not cocompact?)");
        covering_radius = std::max(covering_radius, t);
        if (k % 4 == 0) boundary.push_back(point_at(t, phi));
    }
    domain_diameter = 0.0;
    for (std::size_t a = 0; a < boundary.size(); ++a)
        for (std::size_t b = a + 1; b < boundary.size(); ++b)
            domain_diameter = std::max(domain_diameter, hyp_dist(boundary[a], boundary[b]));

    // Every side of the domain is the bisector of a point at distance <= 2 rho.
    const double neighbor_radius = 2.0 * covering_radius + 0.3;
    neighbors.clear();
    neighbor_pts.clear();
    min_displacement_i = 1e9;
    for (std::size_t j = 0; j < reps.size(); ++j) {
        const double d = hyp_dist(rep_pts[j], point_i());
        if (d <= neighbor_radius) {
            neighbors.push_back(reps[j]);
            neighbor_pts.push_back(rep_pts[j]);
            min_displacement_i = std::min(min_displacement_i, d);
        }
    }

    // BFS step set: side-pairing range elements (displacement at most 2 rho),
    // their stabilizer twists, and the raw generators, deduplicated by the
    // point they send i to. Keeping the set tight is what bounds the work per
    // visited orbit point.
    bfs_steps.clear();
    {
        const double step_radius = 2.0 * covering_radius + 0.05;
        PointDedup dd(1e-9);
        auto add = [&](const SL2& g) {
            const HPoint w = mobius(g, point_i());
            const double d = hyp_dist(w, point_i());
            if (d <= 1e-9 || d > step_radius) return;
            double wx, wy;
            disc_coords(w, wx, wy);
            if (dd.insert(wx, wy)) bfs_steps.push_back(g);
        };
        for (const auto& g : neighbors) {
            add(g);
            add(g.inverse());
            for (const auto& s : stab) {
                add(s * g);
                add(g * s);
            }
        }
        for (const auto& g : generators) {
            add(g);
            add(g.inverse());
        }
    }

    // Point of the domain far from every cone point: maximizes the minimal
    // orbit displacement over a seeded rejection sample of the domain.
    {
        Rng rng(0x5eedULL);
        const double r = covering_radius * 1.05 + 0.02;
        const double xm = std::exp(r) - 1.0, y0 = std::exp(-r), y1 = std::exp(r);
        deep_point_displacement = 0.0;
        deep_point = point_i();
        int found = 0;
        for (int it = 0; it < 60000 && found < 1500; ++it) {
            const double x = rng.uniform(-xm, xm);
            const double y = 1.0 / (1.0 / y0 - rng.uniform() * (1.0 / y0 - 1.0 / y1));
            HPoint z(x, y);
            if (!in_domain(z)) continue;
            ++found;
            double disp = 1e9;
            for (const auto& g : elems) {
                const HPoint w = mobius(g, z);
                const double dd = hyp_dist(w, z);
                if (dd > 1e-9) disp = std::min(disp, dd);
            }
            if (disp > deep_point_displacement) {
                deep_point_displacement = disp;
                deep_point = z;
            }
        }
    }
}

FuchsianGroup triangle_group(int p, int q, int r) {
    if (p < 2 || q < 2 || r < 2)
        throw std::invalid_argument("triangle_group: orders must be >= 2");
    const double defect = 1.0 - 1.0 / p - 1.0 / q - 1.0 / r;
    if (defect <= 1e-12)
        throw std::invalid_argument("triangle_group: signature (" + std::to_string(p) + "," +
                                    std::to_string(q) + "," + std::to_string(r) +
                                    ") is not hyperbolic");
    const double al = pi / p, be = pi / q, ga = pi / r;
    // Hyperbolic dual cosine law for the side lengths.
    const double ab = std::acosh((std::cos(al) * std::cos(be) + std::cos(ga)) /
                                 (std::sin(al) * std::sin(be)));
    const double ac = std::acosh((std::cos(al) * std::cos(ga) + std::cos(be)) /
                                 (std::sin(al) * std::sin(ga)));

    const HPoint A = point_i();
    const HPoint B = point_at(ab, 0.5 * pi);
    FuchsianGroup G;
    bool ok = false;
    for (int orient : {+1, -1}) {
        const HPoint C = point_at(ac, 0.5 * pi - orient * al);
        for (int sgn : {+1, -1}) {
            const SL2 gA = rotation_about(A, sgn * 2.0 * al);
            const SL2 gB = rotation_about(B, sgn * 2.0 * be);
            const SL2 gC = rotation_about(C, sgn * 2.0 * ga);
            if ((gA * gB * gC).projective_diff(SL2()) < 1e-9) {
                G.generators = {gA, gB, gC};
                ok = true;
                break;
            }
        }
        if (ok) break;
    }
    if (!ok) throw std::runtime_error("triangle_group: rotation orientation search failed");

    G.name = "triangle:" + std::to_string(p) + "," + std::to_string(q) + "," + std::to_string(r);
    G.relations.push_back({std::vector<int>(static_cast<std::size_t>(p), 0)});
    G.relations.push_back({std::vector<int>(static_cast<std::size_t>(q), 1)});
    G.relations.push_back({std::vector<int>(static_cast<std::size_t>(r), 2)});
    G.relations.push_back({{0, 1, 2}});
    G.covol_surface = 2.0 * pi * defect;
    G.stabilizer_order = p;
    G.minus_identity = true;  // rotation_about(A, 2 pi / p)^p = -I
    if (G.max_relation_error() > 1e-10)
        throw std::runtime_error("triangle_group: relation check failed");
    G.finalize();
    return G;
}

FuchsianGroup group_from_preset(const std::string& spec) {
    if (spec.rfind("triangle:", 0) == 0) {
        int p, q, r;
        char c1, c2;
        std::istringstream in(spec.substr(9));
        if (!(in >> p >> c1 >> q >> c2 >> r) || c1 != ',' || c2 != ',')
            throw std::invalid_argument("group preset: expected triangle:p,q,r, got " + spec);
        return triangle_group(p, q, r);
    }
    return load_group_file(spec);
}

FuchsianGroup load_group_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open group file " + path);
    FuchsianGroup G;
    G.name = path;
    G.covol_surface = -1.0;
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "gen") {
            double a, b, c, d;
            if (!(ls >> a >> b >> c >> d))
                throw std::invalid_argument("group file: bad generator line: " + line);
            G.generators.emplace_back(a, b, c, d);
        } else if (tag == "rel") {
            Relation rel;
            int k;
            while (ls >> k) {
                if (k == 0) throw std::invalid_argument("group file: relation indices are 1-based");
                rel.word.push_back(k > 0 ? k - 1 : k);
            }
            G.relations.push_back(rel);
        } else if (tag == "covol") {
            ls >> G.covol_surface;
        } else if (tag == "stab") {
            ls >> G.stabilizer_order;
        } else if (tag == "minus_identity") {
            int v;
            ls >> v;
            G.minus_identity = v != 0;
        } else if (tag == "name") {
            ls >> G.name;
        } else {
            throw std::invalid_argument("group file: unknown tag " + tag);
        }
    }
    if (G.generators.empty()) throw std::invalid_argument("group file: no generators");
    if (!(G.covol_surface > 0.0))
        throw std::invalid_argument("group file: covol must be declared positive");
    if (G.max_relation_error() > 1e-10)
        throw std::runtime_error("group file: declared relations fail at 1e-10");
    G.finalize();
    return G;
}

long long OrbitBall::count_within(double R) const {
    if (R < 0.0) return 0;
    const double guard = std::cosh(R) + std::sinh(R) * 1e-9 + 1e-12;
    return static_cast<long long>(std::upper_bound(sorted_cosh_dist.begin(),
                                                   sorted_cosh_dist.end(), guard) -
                                  sorted_cosh_dist.begin());
}

OrbitBall enumerate_orbit_ball(const FuchsianGroup& G, const HPoint& base, double R,
                               const OrbitBallOptions& opts) {
    OrbitBall ball;
    ball.radius = R;
    ball.dedup_tol = opts.dedup_tol;
    const double margin = opts.margin > 0.0 ? opts.margin : 2.0 * G.domain_diameter;
    const double prune_cosh = std::cosh(R + margin);
    const double keep_cosh = std::cosh(R) + std::sinh(R) * 1e-9 + 1e-12;

    // Step elements act at the base point: right multiplication by delta moves
    // gamma.base to gamma.(delta.base), a step of length d(delta.base, base).
    std::vector<SL2> steps = G.bfs_steps;
    if (hyp_dist(base, point_i()) > 1e-9) {
        // Recenter the step set: include conjugates moving `base` a short way.
        const auto local = orbit_elements_near(G, base, 2.0 * G.domain_diameter + 0.5);
        PointDedup dd(1e-9);
        steps.clear();
        for (const auto& g : local) {
            const HPoint w = mobius(g, base);
            if (hyp_dist(w, base) <= 1e-9) continue;
            double wx, wy;
            disc_coords(w, wx, wy);
            if (dd.insert(wx, wy)) steps.push_back(g);
        }
    }

    const std::size_t expected = static_cast<std::size_t>(
        std::min(1e9, 1.3 * ball_area(R + margin) / G.covol_surface + 64.0));
    PointDedup dedup(opts.dedup_tol, expected);
    std::deque<SL2> queue;
    auto visit = [&](const SL2& g) {
        const HPoint w = mobius(g, base);
        const double cd = cosh_dist(w, base);
        if (cd > prune_cosh) return;
        double wx, wy;
        disc_coords(w, wx, wy);
        if (!dedup.insert(wx, wy)) return;
        queue.push_back(g);
        if (cd <= keep_cosh) {
            ball.points.push_back(w);
            ball.elements.push_back(g);
            ball.cosh_dist.push_back(cd);
        }
    };
    visit(SL2());
    while (!queue.empty()) {
        if (dedup.size() > opts.visited_cap) {
            ball.visited = dedup.size();
            ball.valid = false;
            return ball;
        }
        const SL2 g = queue.front();
        queue.pop_front();
        for (const auto& s : steps) visit(g * s);
    }
    ball.visited = dedup.size();
    ball.valid = true;
    ball.sorted_cosh_dist = ball.cosh_dist;
    std::sort(ball.sorted_cosh_dist.begin(), ball.sorted_cosh_dist.end());
    return ball;
}

std::vector<double> brute_force_orbit(const FuchsianGroup& G, const HPoint& base,
                                      double R, int max_layers, std::size_t element_cap) {
    std::vector<SL2> steps;
    for (const auto& g : G.generators) {
        steps.push_back(g);
        steps.push_back(g.inverse());
    }
    const double prune_cosh = std::cosh(R + 2.0 * G.domain_diameter + 1.0);
    const double keep_cosh = std::cosh(R) + std::sinh(R) * 1e-9 + 1e-12;

    ElementDedup seen;
    PointDedup points(1e-9);
    std::vector<double> kept;
    std::vector<SL2> layer{SL2()};
    seen.insert(SL2());
    {
        double wx, wy;
        disc_coords(base, wx, wy);
        points.insert(wx, wy);
    }
    kept.push_back(1.0);
    int quiet = 0;
    for (int l = 0; l < max_layers && quiet < 3; ++l) {
        std::vector<SL2> next;
        std::size_t new_points = 0;
        for (const auto& g : layer) {
            for (const auto& s : steps) {
                const SL2 h = g * s;
                const HPoint w = mobius(h, base);
                const double cd = cosh_dist(w, base);
                if (cd > prune_cosh) continue;
                if (!seen.insert(h)) continue;
                next.push_back(h);
                double wx, wy;
                disc_coords(w, wx, wy);
                if (points.insert(wx, wy) && cd <= keep_cosh) {
                    kept.push_back(cd);
                    ++new_points;
                }
            }
        }
        if (seen.size() > element_cap)
            throw std::runtime_error("brute_force_orbit: element cap exceeded");
        quiet = new_points == 0 ? quiet + 1 : 0;
        layer = std::move(next);
        if (layer.empty()) break;
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<SL2> sample_quotient(const FuchsianGroup& G, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_quotient: n must be >= 1");
    const double r = G.covering_radius * 1.05 + 0.02;
    const double xm = std::exp(r) - 1.0, y0 = std::exp(-r), y1 = std::exp(r);
    std::vector<SL2> out;
    out.reserve(static_cast<std::size_t>(n));
    long long attempts = 0, accepts = 0;
    for (int k = 0; k < n; ++k) {
        Rng rng = Rng::substream(seed, static_cast<uint64_t>(k));
        for (;;) {
            ++attempts;
            if (attempts > 20000 && accepts * 10000LL < attempts)
                throw std::runtime_error(
                    "sample_quotient: rejection efficiency below 1e-4 (accepted " +
                    std::to_string(accepts) + " of " + std::to_string(attempts) + ")");
            const double x = rng.uniform(-xm, xm);
            const double y = 1.0 / (1.0 / y0 - rng.uniform() * (1.0 / y0 - 1.0 / y1));
            HPoint z(x, y);
            if (!G.in_domain(z)) continue;
            ++accepts;
            out.push_back(iwasawa(x, y, rng.uniform(0.0, full_circle)));
            break;
        }
    }
    return out;
}

std::vector<SL2> orbit_elements_near(const FuchsianGroup& G, const HPoint& z0, double R) {
    std::vector<SL2> steps;
    for (const auto& g : G.generators) {
        steps.push_back(g);
        steps.push_back(g.inverse());
    }
    for (const auto& g : G.neighbors) {
        steps.push_back(g);
        steps.push_back(g.inverse());
    }
    const double prune_cosh = std::cosh(R + 2.0 * G.domain_diameter + 1.0);
    const double keep_cosh = std::cosh(R) + std::sinh(R) * 1e-9 + 1e-12;
    ElementDedup seen;
    std::deque<SL2> queue;
    std::vector<SL2> out;
    seen.insert(SL2());
    queue.push_back(SL2());
    if (cosh_dist(z0, point_i()) <= keep_cosh) {
        out.push_back(SL2());
        out.push_back(-SL2());
    }
    while (!queue.empty()) {
        const SL2 g = queue.front();
        queue.pop_front();
        for (const auto& s : steps) {
            const SL2 h = g * s;
            const double cd = cosh_dist(mobius(h, z0), point_i());
            if (cd > prune_cosh) continue;
            if (!seen.insert(h)) continue;
            queue.push_back(h);
            if (cd <= keep_cosh) {
                out.push_back(h);
                out.push_back(-h);
            }
        }
        if (seen.size() > 2'000'000)
            throw std::runtime_error("orbit_elements_near: enumeration exploded");
    }
    return out;
}

}  // namespace hypcircle
