#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "hotstart/controllers.hpp"
#include "hotstart/hungarian.hpp"
#include "hotstart/random.hpp"
#include "hotstart/value_grid.hpp"

using namespace hotstart;

namespace {

Vec2 rotate(Vec2 p, double a) {
    return {std::cos(a) * p.x - std::sin(a) * p.y, std::sin(a) * p.x + std::cos(a) * p.y};
}

// Exhaustive enumeration of theta_ij over all unordered pairs.
std::pair<int, int> brute_force_weakest_pair(Vec2 e, const std::vector<Vec2>& ps) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> arg{-1, -1};
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            auto phi = [&](Vec2 p) {
                const double d = distance(p, e);
                return d * d > 1.0 ? std::acos(std::clamp((1.0 - d * d) / (2.0 * d), -1.0, 1.0)) : 0.0;
            };
            auto los = [&](Vec2 p) { return std::atan2(p.y - e.y, p.x - e.x); };
            double gap = los(ps[i]) - los(ps[j]);
            while (gap > kPi) gap -= 2 * kPi;
            while (gap <= -kPi) gap += 2 * kPi;
            const double theta = phi(ps[i]) + phi(ps[j]) - gap;
            if (theta < best) {
                best = theta;
                arg = {static_cast<int>(i), static_cast<int>(j)};
            }
        }
    return arg;
}

double brute_force_min_cost(const CostMatrix& c) {
    std::vector<int> perm(static_cast<std::size_t>(c.cols));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double sum = 0.0;
        for (int i = 0; i < c.rows; ++i) sum += c(i, perm[i]);
        best = std::min(best, sum);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

CostMatrix random_integer_matrix(Rng& rng, int n, int m, int hi) {
    CostMatrix c(n, m);
    for (double& x : c.data) x = static_cast<double>(uniform_index(rng, static_cast<std::size_t>(hi)));
    return c;
}

const ValueGrid& flat_grid() {
    static const ValueGrid g(41, 0.0);
    return g;
}

} // namespace

// ---------------------------------------------------------------------------
// Weakest-link evader

TEST(WeakestLink, NeedsTwoPursuers) {
    const std::vector<Vec2> one{{1, 0}};
    EXPECT_THROW(evader_weakest_link(Vec2{}, one), std::invalid_argument);
    EXPECT_THROW(find_weakest_link(Vec2{}, std::vector<Vec2>{}), std::invalid_argument);
}

TEST(WeakestLink, OpposedPursuersAtDistanceThree) {
    // d = 3 for both: phi = arccos(clamp(-8/6)) = pi, root = sqrt(7),
    // lambda = 0 and pi, so Psi_s = -1/3 - 1/3 and Psi_c = -1/(3 sqrt 7) + 1/(3 sqrt 7).
    const std::vector<Vec2> ps{{3, 0}, {-3, 0}};
    const WeakestLink link = find_weakest_link(Vec2{}, ps);
    EXPECT_EQ(link.first, 0);
    EXPECT_EQ(link.second, 1);
    EXPECT_NEAR(link.theta, kPi, 1e-12);

    const double r7 = std::sqrt(7.0);
    const double psi_s = (std::cos(kPi) - std::sin(kPi) / r7) / 3.0 - (std::cos(0.0) + std::sin(0.0) / r7) / 3.0;
    const double psi_c = (std::sin(0.0) - std::cos(0.0) / r7) / 3.0 - (std::sin(kPi) + std::cos(kPi) / r7) / 3.0;
    const double heading = evader_weakest_link(Vec2{}, ps);
    EXPECT_TRUE(std::isfinite(heading));
    EXPECT_DOUBLE_EQ(heading, std::atan2(psi_s, psi_c));
    EXPECT_NEAR(heading, -kPi / 2, 1e-12);
}

TEST(WeakestLink, PairMatchesExhaustiveEnumeration) {
    // Pursuers 0 and 1 sit close together; 2 is far away.
    const std::vector<Vec2> ps{{0.5, 0.6}, {0.6, 0.5}, {-0.9, -0.2}};
    const WeakestLink link = find_weakest_link(Vec2{}, ps);
    const auto oracle = brute_force_weakest_pair(Vec2{}, ps);
    EXPECT_EQ(link.first, oracle.first);
    EXPECT_EQ(link.second, oracle.second);

    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 4));
        std::vector<Vec2> pts;
        for (int i = 0; i < n; ++i) pts.push_back(3.0 * uniform_in_world(rng));
        const Vec2 e = uniform_in_world(rng);
        const WeakestLink l = find_weakest_link(e, pts);
        const auto o = brute_force_weakest_pair(e, pts);
        EXPECT_EQ(std::make_pair(l.first, l.second), o) << "trial " << trial;
    }
}

TEST(WeakestLink, MirrorSymmetricPairHeadsAlongAxis) {
    // Pursuers symmetric about the y-axis with the evader on it: reflecting
    // x maps the scene onto itself, so the heading's x-component must vanish.
    const std::vector<Vec2> ps{{2.0, 1.5}, {-2.0, 1.5}};
    const Vec2 u = from_heading(evader_weakest_link(Vec2{}, ps));
    EXPECT_NEAR(u.x, 0.0, 1e-12);
}

TEST(WeakestLink, ReflectionNegatesHeadingXComponent) {
    const std::vector<Vec2> ps{{2.0, 1.5}, {-2.5, 1.0}};
    std::vector<Vec2> mirrored;
    for (auto it = ps.rbegin(); it != ps.rend(); ++it) mirrored.push_back({-it->x, it->y});
    const Vec2 u = from_heading(evader_weakest_link(Vec2{}, ps));
    const Vec2 v = from_heading(evader_weakest_link(Vec2{}, mirrored));
    EXPECT_NEAR(v.x, -u.x, 1e-12);
    EXPECT_NEAR(v.y, u.y, 1e-12);
}

TEST(WeakestLink, ArgminPairInvariantUnderRotation) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + static_cast<int>(uniform_index(rng, 3));
        std::vector<Vec2> ps;
        for (int i = 0; i < n; ++i) ps.push_back(3.0 * uniform_in_world(rng));
        const WeakestLink base = find_weakest_link(Vec2{}, ps);
        const double a = uniform(rng, -kPi, kPi);
        std::vector<Vec2> rot;
        for (Vec2 p : ps) rot.push_back(rotate(p, a));
        const WeakestLink r = find_weakest_link(Vec2{}, rot);
        EXPECT_NEAR(r.theta, base.theta, 1e-9);
        // Ties aside, the same pair wins.
        if (std::abs(r.theta - base.theta) < 1e-9 && r.first != base.first) continue;
        EXPECT_EQ(r.first, base.first);
        EXPECT_EQ(r.second, base.second);
    }
}

TEST(WeakestLink, HeadingFiniteForCoincidentAgents) {
    const std::vector<Vec2> ps{{0, 0}, {0, 0}, {0.3, 0}};
    EXPECT_TRUE(std::isfinite(evader_weakest_link(Vec2{}, ps)));
}

// ---------------------------------------------------------------------------
// Interception pursuer

TEST(InterceptHeading, FasterEvaderAimsBehind) {
    // Offset = 2 * 1 / (1 - 4) = -2/3 in x, (-)0 in y: heading pi (atan2 may
    // report the equivalent -pi for the signed zero).
    const double theta = pursuer_intercept_heading({0, 0}, {1, 0}, 2.0, 0.0);
    EXPECT_NEAR(std::abs(theta), kPi, 1e-15);
    EXPECT_NEAR(std::cos(theta), -1.0, 1e-15);
}

TEST(InterceptHeading, NorthernEvaderFollowsDenominatorSign) {
    EXPECT_NEAR(pursuer_intercept_heading({0, 0}, {0, 1}, 2.0, 0.0), -kPi / 2, 1e-15);
    EXPECT_NEAR(pursuer_intercept_heading({0, 0}, {0, 1}, 0.5, 0.0), kPi / 2, 1e-15);
}

TEST(InterceptHeading, TranslationInvariant) {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const Vec2 p = uniform_in_world(rng), e = uniform_in_world(rng), t = uniform_in_world(rng);
        EXPECT_NEAR(pursuer_intercept_heading(p, e, 2.0, 0.1), pursuer_intercept_heading(p + t, e + t, 2.0, 0.1),
                    1e-12);
    }
}

TEST(InterceptHeading, SingularAtUnitRatio) {
    EXPECT_THROW(pursuer_intercept_heading({0, 0}, {1, 0}, 1.0, 0.1), std::domain_error);
}

// ---------------------------------------------------------------------------
// Upwind differences and the HJI step

TEST(UpwindGradient, LinearField) {
    const ValueGrid g = ValueGrid::sample(21, [](Vec2 p) { return p.x; });
    for (int i = 1; i < 20; ++i)
        for (int j = 1; j < 20; ++j)
            for (Role r : {Role::Pursuer, Role::Evader}) {
                const Vec2 d = upwind_gradient(g, i, j, r);
                EXPECT_NEAR(d.x, 1.0, 1e-12);
                EXPECT_NEAR(d.y, 0.0, 1e-12);
            }
}

TEST(UpwindGradient, ConstantFieldIsZero) {
    const ValueGrid g(11, 3.5);
    for (Role r : {Role::Pursuer, Role::Evader}) {
        EXPECT_EQ(upwind_gradient(g, 5, 5, r), (Vec2{0, 0}));
        EXPECT_EQ(upwind_gradient(g, 0, 10, r), (Vec2{0, 0}));
    }
}

TEST(UpwindGradient, KinkSelectsByRole) {
    // V = |x|: at the kink cell the forward difference is +1 and the backward
    // difference -1, so the pursuer takes backward and the evader forward.
    const ValueGrid g = ValueGrid::sample(21, [](Vec2 p) { return std::abs(p.x); });
    const int mid = 10;
    ASSERT_NEAR(g.cell_center(mid, mid).x, 0.0, 1e-15);
    EXPECT_NEAR(upwind_gradient(g, mid, mid, Role::Pursuer).x, -1.0, 1e-12);
    EXPECT_NEAR(upwind_gradient(g, mid, mid, Role::Evader).x, 1.0, 1e-12);
    // One cell to the left both one-sided differences are -1.
    EXPECT_NEAR(upwind_gradient(g, mid - 1, mid, Role::Pursuer).x, -1.0, 1e-12);
    EXPECT_NEAR(upwind_gradient(g, mid - 1, mid, Role::Evader).x, -1.0, 1e-12);
}

TEST(UpwindGradient, NegativeForwardFlipsSelection) {
    // V = -|x| at the peak: forward -1 < 0, backward +1.
    const ValueGrid g = ValueGrid::sample(21, [](Vec2 p) { return -std::abs(p.x); });
    EXPECT_NEAR(upwind_gradient(g, 10, 10, Role::Pursuer).x, -1.0, 1e-12);
    EXPECT_NEAR(upwind_gradient(g, 10, 10, Role::Evader).x, 1.0, 1e-12);
}

TEST(UpwindGradient, BoundaryUsesAvailableSide) {
    const ValueGrid g = ValueGrid::sample(11, [](Vec2 p) { return p.x * p.x + 2.0 * p.y; });
    const double h = g.spacing();
    const Vec2 lo = upwind_gradient(g, 0, 0, Role::Pursuer);
    EXPECT_NEAR(lo.x, (g(1, 0) - g(0, 0)) / h, 1e-12);
    EXPECT_NEAR(lo.y, 2.0, 1e-12);
    const Vec2 hi = upwind_gradient(g, 10, 10, Role::Evader);
    EXPECT_NEAR(hi.x, (g(10, 10) - g(9, 10)) / h, 1e-12);
    EXPECT_NEAR(hi.y, 2.0, 1e-12);
    EXPECT_THROW(upwind_gradient(g, 11, 0, Role::Pursuer), std::out_of_range);
}

TEST(ValueGridShape, SpacingAndValidation) {
    EXPECT_THROW(ValueGrid(2), std::invalid_argument);
    const ValueGrid g(41);
    EXPECT_DOUBLE_EQ(g.spacing(), 0.05);
    EXPECT_TRUE(g.all_finite());
}

TEST(HjiUpdate, ConstantGridUnchanged) {
    const ValueGrid g(21, 0.7);
    const ValueGrid next = hji_update(g, 0.05, 1.0, 0.5);
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) EXPECT_EQ(next(i, j), 0.7);
}

TEST(HjiUpdate, RejectsCflViolation) {
    const ValueGrid g(41);
    EXPECT_THROW(hji_update(g, 0.06, 1.0, 0.5), std::domain_error);
    EXPECT_THROW(hji_update(g, 0.0, 1.0, 0.5), std::invalid_argument);
    EXPECT_NO_THROW(hji_update(g, 0.05, 1.0, 1.0));
}

TEST(HjiUpdate, EikonalDecreaseAlongAxis) {
    // 5x5 grid, V = distance to (-1, 0). Along the row through the source the
    // x-differences are exactly 1 and the y-differences straddle zero, so the
    // pursuer gradient is (1, 0) and each value drops by v_P * dt.
    const Vec2 src{-1.0, 0.0};
    const ValueGrid g = ValueGrid::sample(5, [&](Vec2 p) { return distance(p, src); });
    const double dt = 0.1;
    const ValueGrid next = hji_update(g, dt, 1.0, 0.0);
    for (int i = 1; i < 5; ++i) EXPECT_NEAR(next(i, 2), g(i, 2) - dt, 1e-12) << "i=" << i;
    // The source cell is a minimum and does not move.
    EXPECT_NEAR(next(0, 2), g(0, 2), 1e-15);
}

TEST(HjiUpdate, EqualSpeedsNearlyCancel) {
    const ValueGrid g = ValueGrid::sample(21, [](Vec2 p) { return norm(p); });
    const ValueGrid next = hji_update(g, 0.05, 1.0, 1.0);
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) EXPECT_LE(std::abs(next(i, j) - g(i, j)), g.spacing());
}

TEST(HjiUpdate, MaxAbsNonIncreasingWithStillEvader) {
    const std::vector<Vec2> targets{{0.3, -0.2}};
    ValueGrid g = distance_field(21, targets, 0.1);
    const double dt = g.spacing();  // per-axis Courant number exactly 1
    double prev = g.max_abs();
    for (int k = 0; k < 100; ++k) {
        g = hji_update(g, dt, 1.0, 0.0);
        ASSERT_TRUE(g.all_finite());
        EXPECT_LE(g.max_abs(), prev + 1e-12) << "step " << k;
        prev = g.max_abs();
    }
}

TEST(HjiUpdate, LiteralSelectionIsNotMonotone) {
    // Documents why the step uses the monotone selection: applying the
    // literal per-role choice at the apex of a cone overshoots the minimum.
    const ValueGrid g = ValueGrid::sample(21, [](Vec2 p) { return norm(p); });
    const Vec2 grad = upwind_gradient(g, 10, 10, Role::Pursuer);
    EXPECT_GT(norm(grad), 0.5);
    const ValueGrid next = hji_update(g, 0.05, 1.0, 0.0);
    EXPECT_NEAR(next(10, 10), g(10, 10), 1e-15);
}

TEST(DistanceField, MinOverTargetsMinusRadius) {
    const std::vector<Vec2> ts{{-0.5, 0.0}, {0.5, 0.0}};
    const ValueGrid g = distance_field(21, ts, 0.1);
    EXPECT_NEAR(g(15, 10), -0.1, 1e-12);  // cell at (0.5, 0)
    EXPECT_NEAR(g(10, 10), 0.4, 1e-12);
    EXPECT_THROW(distance_field(21, std::vector<Vec2>{}, 0.1), std::invalid_argument);
}

TEST(ValueGridIo, CsvHasOneLinePerRow) {
    const ValueGrid g = ValueGrid::sample(5, [](Vec2 p) { return p.x + 10 * p.y; });
    const std::string csv = g.to_csv();
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_EQ(csv.substr(0, csv.find(',')), "-11");
}

// ---------------------------------------------------------------------------
// Cost matrix and assignment

TEST(HybridCost, GeometricLimitIsDistance) {
    const std::vector<Vec2> ps{{0, 0}, {1, 1}, {-0.5, 0.3}};
    const std::vector<Vec2> es{{0.5, 0}, {-0.5, 0.2}};
    const ValueGrid g = ValueGrid::sample(11, [](Vec2 p) { return p.x * p.y; });
    const CostMatrix c = hybrid_cost_matrix(ps, es, g, 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(c(i, j), distance(ps[i], es[j]));
}

TEST(HybridCost, ValueLimitIsConstantPerColumn) {
    const std::vector<Vec2> ps{{0, 0}, {1, 1}, {-0.5, 0.3}};
    const std::vector<Vec2> es{{0.5, 0}, {-0.5, 0.2}, {0.1, 0.9}};
    const ValueGrid g = ValueGrid::sample(11, [](Vec2 p) { return p.x + p.y * p.y; });
    const CostMatrix c = hybrid_cost_matrix(ps, es, g, 0.0);
    for (int j = 0; j < 3; ++j)
        for (int i = 1; i < 3; ++i) EXPECT_DOUBLE_EQ(c(i, j), c(0, j));
}

TEST(HybridCost, HandComputedBlend) {
    // V = x is reproduced exactly by bilinear interpolation: V(e0) = 0.5 and
    // V(e1) = -0.5 rescale onto [d_min, d_max] = [0.5, 1.7].
    const std::vector<Vec2> ps{{0, 0}, {1, 1}};
    const std::vector<Vec2> es{{0.5, 0}, {-0.5, 0.2}};
    const ValueGrid g = ValueGrid::sample(3, [](Vec2 p) { return p.x; });
    const CostMatrix c = hybrid_cost_matrix(ps, es, g, 0.5);
    EXPECT_NEAR(c(0, 0), 0.25 + 0.85, 1e-12);
    EXPECT_NEAR(c(0, 1), 0.5 * std::sqrt(0.29) + 0.25, 1e-12);
    EXPECT_NEAR(c(1, 0), 0.5 * std::sqrt(1.25) + 0.85, 1e-12);
    EXPECT_NEAR(c(1, 1), 0.85 + 0.25, 1e-12);
}

TEST(HybridCost, FlatValueMapsToMidRange) {
    const std::vector<Vec2> ps{{0, 0}};
    const std::vector<Vec2> es{{0.5, 0}, {0, 1}};
    const CostMatrix c = hybrid_cost_matrix(ps, es, flat_grid(), 0.0);
    EXPECT_NEAR(c(0, 0), 0.75, 1e-12);
    EXPECT_NEAR(c(0, 1), 0.75, 1e-12);
}

TEST(HybridCost, Errors) {
    const std::vector<Vec2> ps{{0, 0}};
    EXPECT_THROW(hybrid_cost_matrix(ps, std::vector<Vec2>{}, flat_grid(), 0.5), std::invalid_argument);
    EXPECT_THROW(hybrid_cost_matrix(ps, ps, flat_grid(), 1.5), std::invalid_argument);
}

TEST(BearingAngles, RowsArePursuers) {
    const std::vector<Vec2> ps{{0, 0}, {1, 1}};
    const std::vector<Vec2> es{{1, 0}, {1, 2}};
    const CostMatrix b = bearing_angles(ps, es);
    EXPECT_NEAR(b(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(b(1, 0), -kPi / 2, 1e-15);
    EXPECT_NEAR(b(1, 1), kPi / 2, 1e-15);
    EXPECT_NEAR(b(0, 1), std::atan2(2.0, 1.0), 1e-15);
}

TEST(Hungarian, IdentityCheap) {
    CostMatrix c(3, 3, 1.0);
    for (int i = 0; i < 3; ++i) c(i, i) = 0.0;
    const Assignment a = hungarian_assign(c);
    EXPECT_EQ(a.target, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(a.total_cost, 0.0);
}

TEST(Hungarian, MatchesPermutationEnumeration) {
    Rng rng(2024);
    for (int n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 40; ++trial) {
            const CostMatrix c = random_integer_matrix(rng, n, n, 20);
            const Assignment a = hungarian_assign(c);
            EXPECT_EQ(a.total_cost, brute_force_min_cost(c)) << "n=" << n << " trial=" << trial;
            std::vector<int> seen = a.target;
            std::sort(seen.begin(), seen.end());
            for (int k = 0; k < n; ++k) EXPECT_EQ(seen[k], k);
        }
    }
}

TEST(Hungarian, RealValuedMatchesEnumeration) {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        CostMatrix c(5, 5);
        for (double& x : c.data) x = uniform(rng, -3.0, 3.0);
        EXPECT_NEAR(hungarian_assign(c).total_cost, brute_force_min_cost(c), 1e-12);
    }
}

TEST(Hungarian, TotalCostIsSumOfAssignedEntries) {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(uniform_index(rng, 5));
        const int m = 1 + static_cast<int>(uniform_index(rng, 5));
        const CostMatrix c = random_integer_matrix(rng, n, m, 9);
        const Assignment a = hungarian_assign(c);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            ASSERT_NE(a.target[i], Assignment::kUnassigned);
            sum += c(i, a.target[i]);
        }
        EXPECT_EQ(a.total_cost, sum);
        if (n >= m) {
            std::vector<char> covered(static_cast<std::size_t>(m), 0);
            for (int t : a.target) covered[t] = 1;
            EXPECT_TRUE(std::all_of(covered.begin(), covered.end(), [](char x) { return x == 1; }));
        }
    }
}

TEST(Hungarian, SurplusPursuerTakesCheapestEvader) {
    // Best size-2 matching: p0->e0 (1) + p1->e1 (1). Surplus p2 then chases
    // its individually cheapest evader, e1.
    CostMatrix c(3, 2);
    c(0, 0) = 1; c(0, 1) = 5;
    c(1, 0) = 6; c(1, 1) = 1;
    c(2, 0) = 4; c(2, 1) = 3;
    const Assignment a = hungarian_assign(c);
    EXPECT_EQ(a.target, (std::vector<int>{0, 1, 1}));
    EXPECT_EQ(a.total_cost, 5.0);
}

TEST(Hungarian, MoreEvadersThanPursuers) {
    CostMatrix c(2, 3);
    c(0, 0) = 4; c(0, 1) = 1; c(0, 2) = 3;
    c(1, 0) = 2; c(1, 1) = 0; c(1, 2) = 5;
    const Assignment a = hungarian_assign(c);
    EXPECT_EQ(a.target, (std::vector<int>{1, 0}));
    EXPECT_EQ(a.total_cost, 3.0);
}

TEST(Hungarian, RejectsBadInput) {
    CostMatrix c(2, 2, 1.0);
    c(1, 0) = std::nan("");
    EXPECT_THROW(hungarian_assign(c), std::invalid_argument);
    c(1, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(hungarian_assign(c), std::invalid_argument);
    EXPECT_THROW(hungarian_assign(CostMatrix{}), std::invalid_argument);
}

TEST(Hungarian, Deterministic) {
    CostMatrix c(4, 4, 1.0);
    const Assignment a = hungarian_assign(c);
    const Assignment b = hungarian_assign(c);
    EXPECT_EQ(a.target, b.target);
    EXPECT_EQ(a.total_cost, 4.0);
}

// ---------------------------------------------------------------------------
// Blended controls

TEST(PursuerControl, GeometricLimitPointsAtTarget) {
    const ValueGrid g = ValueGrid::sample(41, [](Vec2 p) { return p.y; });
    const Vec2 u = pursuer_hybrid_control({0.1, 0.2}, {0.4, 0.6}, g, 1.0);
    EXPECT_NEAR(u.x, 0.6, 1e-12);
    EXPECT_NEAR(u.y, 0.8, 1e-12);
}

TEST(PursuerControl, PerpendicularBlend) {
    // V = -y: the descent direction is +y, the target lies along +x.
    const ValueGrid g = ValueGrid::sample(41, [](Vec2 p) { return -p.y; });
    const Vec2 u = pursuer_hybrid_control({0, 0}, {0.5, 0}, g, 0.5);
    EXPECT_NEAR(u.x, 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(u.y, 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(PursuerControl, AgreeingTermsIgnoreAlpha) {
    const ValueGrid g = ValueGrid::sample(41, [](Vec2 p) { return -p.x; });
    for (double alpha : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        const Vec2 u = pursuer_hybrid_control({0, 0}, {0.5, 0}, g, alpha);
        EXPECT_NEAR(u.x, 1.0, 1e-12);
        EXPECT_NEAR(u.y, 0.0, 1e-12);
    }
}

TEST(PursuerControl, OpposedTermsCancel) {
    const ValueGrid g = ValueGrid::sample(41, [](Vec2 p) { return p.x; });
    EXPECT_EQ(pursuer_hybrid_control({0, 0}, {0.5, 0}, g, 0.5), (Vec2{0, 0}));
}

TEST(PursuerControl, OnTargetHoldsStill) {
    EXPECT_EQ(pursuer_hybrid_control({0.2, 0.2}, {0.2, 0.2}, flat_grid(), 0.5), (Vec2{0, 0}));
}

TEST(EvaderControl, FleesSinglePursuer) {
    const std::vector<Vec2> ps{{-0.1, 0.0}};
    const Vec2 u = evader_escape_control({0, 0}, ps, flat_grid(), 0.3);
    EXPECT_NEAR(u.x, 1.0, 1e-12);
    EXPECT_NEAR(u.y, 0.0, 1e-12);
}

TEST(EvaderControl, SymmetricPursuersCancelVertically) {
    const std::vector<Vec2> ps{{0.0, 0.1}, {0.0, -0.1}};
    const Vec2 u = evader_escape_control({0, 0}, ps, flat_grid(), 0.3);
    EXPECT_NEAR(u.y, 0.0, 1e-12);
}

TEST(EvaderControl, AvoidanceDirectSum) {
    // Pursuers at distance d to the west and 2d to the east:
    // (d, 0)/d^2 + (-2d, 0)/(4d^2) = (1/(2d), 0).
    const double d = 0.05;
    const std::vector<Vec2> ps{{-d, 0.0}, {2 * d, 0.0}};
    const Vec2 a = avoidance_vector({0, 0}, ps, 0.3);
    EXPECT_NEAR(a.x, 1.0 / d - 1.0 / (2.0 * d), 1e-9);
    EXPECT_NEAR(a.y, 0.0, 1e-12);
}

TEST(EvaderControl, OutsideRadiusIgnored) {
    const std::vector<Vec2> ps{{-0.5, 0.0}};
    EXPECT_EQ(avoidance_vector({0, 0}, ps, 0.3), (Vec2{0, 0}));
    EXPECT_EQ(evader_escape_control({0, 0}, ps, flat_grid(), 0.3), (Vec2{0, 0}));
}

TEST(EvaderControl, CoincidentPursuerIsFinite) {
    const std::vector<Vec2> ps{{0.2, 0.2}, {0.25, 0.2}};
    const Vec2 a = avoidance_vector({0.2, 0.2}, ps, 0.3);
    EXPECT_TRUE(std::isfinite(a.x) && std::isfinite(a.y));
    const Vec2 u = evader_escape_control({0.2, 0.2}, ps, flat_grid(), 0.3);
    EXPECT_NEAR(norm(u), 1.0, 1e-12);
}

TEST(EvaderControl, AscendsValueGradient) {
    const ValueGrid g = ValueGrid::sample(41, [](Vec2 p) { return p.y; });
    const Vec2 u = evader_escape_control({0, 0}, std::vector<Vec2>{}, g, 0.3);
    EXPECT_NEAR(u.y, 1.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Policies: every control is finite and either zero or unit length.

class PolicyControls : public ::testing::TestWithParam<GameType> {};

TEST_P(PolicyControls, UnitOrZeroAndFinite) {
    const GameType game = GetParam();
    const Scenario s = Scenario::for_game(game);
    const auto pol = default_policies(s);
    Rng rng(derive_seed(99, static_cast<std::uint64_t>(game.pursuers * 10 + game.evaders)));
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<AgentState> ps, es;
        for (int i = 0; i < game.pursuers; ++i) ps.push_back({uniform_in_world(rng), {}});
        for (int j = 0; j < game.evaders; ++j) es.push_back({uniform_in_world(rng), {}});
        std::vector<char> alive(static_cast<std::size_t>(game.evaders), 1);
        if (game.evaders > 1) alive[0] = static_cast<char>(trial % 2);
        const WorldView view{s, ps, es, alive, 0};
        for (const Controls& cs : {pol.pursuers(view, rng), pol.evaders(view, rng)}) {
            for (Vec2 u : cs) {
                ASSERT_TRUE(std::isfinite(u.x) && std::isfinite(u.y));
                const double n = norm(u);
                EXPECT_TRUE(n == 0.0 || std::abs(n - 1.0) < 1e-12) << n;
            }
        }
    }
}

INSTANTIATE_TEST_SUITE_P(AllGames, PolicyControls, ::testing::ValuesIn(standard_game_types()),
                         [](const auto& info) { return "g" + info.param.name(); });

TEST(Policies, InterceptFreezesWithinRadius) {
    const Scenario s = Scenario::for_game({2, 1});
    std::vector<AgentState> ps{{{0.0, 0.0}, {}}, {{0.5, 0.5}, {}}};
    std::vector<AgentState> es{{{0.05, 0.0}, {}}};
    std::vector<char> alive{1};
    Rng rng(1);
    const Controls u = intercept_pursuer_policy()(WorldView{s, ps, es, alive, 0}, rng);
    EXPECT_EQ(u[0], (Vec2{0, 0}));
    EXPECT_NEAR(norm(u[1]), 1.0, 1e-12);
}

TEST(Policies, CapturedEvaderGetsNoControl) {
    const Scenario s = Scenario::for_game({3, 2});
    std::vector<AgentState> ps{{{0, 0}, {}}, {{0.5, 0.5}, {}}, {{-0.5, 0.2}, {}}};
    std::vector<AgentState> es{{{0.3, 0.3}, {}}, {{-0.7, -0.7}, {}}};
    std::vector<char> alive{0, 1};
    Rng rng(1);
    const Controls u = hybrid_evader_policy()(WorldView{s, ps, es, alive, 0}, rng);
    EXPECT_EQ(u[0], (Vec2{0, 0}));
}
