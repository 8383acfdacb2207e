#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rational.hpp"
#include "tcx/complexity.hpp"
#include "tcx/error.hpp"
#include "tcx/linalg.hpp"
#include "tcx/stats.hpp"

using namespace tcx;
using tcx::oracle::IntMatrix;
using tcx::oracle::Rational;

namespace {

const IntMatrix kNested{{1, 1, 1}, {1, 1, 0}, {1, 0, 0}};
const IntMatrix kIdentity3{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

SpecializationMatrix net(const IntMatrix& m) { return SpecializationMatrix::from_dense(m); }

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double pop_sd(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

// ---- reflect ----------------------------------------------------------------

TEST(Reflect, NestedFirstOrderExact) {
    const auto states = reflect<Rational>(net(kNested), 3);
    ASSERT_EQ(states.size(), 4u);
    EXPECT_EQ(states[0].k_t, (std::vector<Rational>{3, 2, 1}));
    EXPECT_EQ(states[0].k_c, (std::vector<Rational>{3, 2, 1}));
    EXPECT_EQ(states[1].k_t, (std::vector<Rational>{2, Rational(5, 2), 3}));
    // K_{C,1}: mean ubiquity of each actor's categories.
    EXPECT_EQ(states[1].k_c, (std::vector<Rational>{2, Rational(5, 2), 3}));
}

TEST(Reflect, AllOnesIsAFixedPoint) {
    const IntMatrix ones(4, std::vector<int>(5, 1));
    const auto states = reflect<Rational>(net(ones), 4);
    for (std::size_t n = 1; n < states.size(); ++n) {
        const Rational expect_t = n % 2 == 1 ? Rational(5) : Rational(4);
        for (const auto& v : states[n].k_t) EXPECT_EQ(v, expect_t) << "order " << n;
    }
    EXPECT_EQ(states[1].k_t, (std::vector<Rational>(5, Rational(5))));
}

TEST(Reflect, IdentityStaysOne) {
    const auto states = reflect<Rational>(net(kIdentity3), 5);
    for (const auto& s : states) {
        for (const auto& v : s.k_t) EXPECT_EQ(v, Rational(1));
        for (const auto& v : s.k_c) EXPECT_EQ(v, Rational(1));
    }
}

TEST(Reflect, FirstOrderIsMeanOfNeighbourDegrees) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto dense = oracle::random_connected(rng, 2 + rng() % 10, 2 + rng() % 8, 0.4);
        const auto m = net(dense);
        const auto states = reflect<Rational>(m, 1);
        for (std::size_t t = 0; t < m.category_count(); ++t) {
            Rational sum(0);
            int count = 0;
            for (std::size_t a = 0; a < dense.size(); ++a) {
                if (dense[a][t]) {
                    sum = sum + Rational(std::accumulate(dense[a].begin(), dense[a].end(), 0));
                    ++count;
                }
            }
            EXPECT_EQ(states[1].k_t[t], sum / Rational(count));
        }
    }
}

TEST(Reflect, Preconditions) {
    EXPECT_THROW(reflect(net(kNested), 0), ArgumentError);
    EXPECT_THROW(reflect(net({{1, 0}, {0, 0}}), 1), StructuralError);
}

// ---- reduced_matrix ---------------------------------------------------------

TEST(ReducedMatrix, NestedRowsExact) {
    const auto r = reduced_matrix<Rational>(net(kNested));
    EXPECT_EQ(r[0], (std::vector<Rational>{Rational(11, 18), Rational(5, 18), Rational(1, 9)}));
    EXPECT_EQ(r[1], (std::vector<Rational>{Rational(5, 12), Rational(5, 12), Rational(1, 6)}));
    EXPECT_EQ(r[2], (std::vector<Rational>{Rational(1, 3), Rational(1, 3), Rational(1, 3)}));
    for (const auto& row : r) EXPECT_EQ(row[0] + row[1] + row[2], Rational(1));
}

TEST(ReducedMatrix, IdentityGivesIdentity) {
    const auto r = reduced_matrix<Rational>(net(kIdentity3));
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(r[i][j], Rational(i == j ? 1 : 0));
    }
}

TEST(ReducedMatrix, RowStochasticProperty) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = net(oracle::random_connected(rng, 1 + rng() % 40, 1 + rng() % 30, 0.05 + 0.6 * oracle::uniform01(rng)));
        for (const auto& row : reduced_matrix(m)) {
            double s = 0.0;
            for (double v : row) s += v;
            EXPECT_NEAR(s, 1.0, 1e-12);
        }
        for (const auto& row : actor_reduced_matrix(m)) {
            double s = 0.0;
            for (double v : row) s += v;
            EXPECT_NEAR(s, 1.0, 1e-12);
        }
    }
}

TEST(ReducedMatrix, OnesVectorHasEigenvalueOne) {
    std::mt19937_64 rng(23);
    const auto m = net(oracle::random_connected(rng, 15, 10, 0.3));
    const auto r = reduced_matrix(m);
    Eigen::MatrixXd e(10, 10);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) e(i, j) = r[i][j];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(e);
    double largest = -1.0;
    for (int i = 0; i < 10; ++i) {
        largest = std::max(largest, es.eigenvalues()(i).real());
        EXPECT_NEAR(es.eigenvalues()(i).imag(), 0.0, 1e-10);
    }
    EXPECT_NEAR(largest, 1.0, 1e-12);
}

// ---- tci_eigen ----------------------------------------------------------------

TEST(TciEigen, NestedMatchesDenseOracle) {
    const auto res = tci_eigen(net(kNested));
    const auto oracle = oracle::dense_tci(kNested);
    EXPECT_LT(oracle::aligned_max_diff(res.tci, oracle.tci), 1e-10);
    EXPECT_NEAR(res.diagnostics.eigenvalue2, oracle.eigenvalues[1], 1e-12);
    EXPECT_NEAR(res.diagnostics.eigenvalue3, oracle.eigenvalues[2], 1e-12);
    // Sign rule: corr(tci, avg_diversity) >= 0, so the least ubiquitous
    // category (highest avg diversity) scores highest.
    EXPECT_EQ(res.diagnostics.sign_rule, "avg_diversity");
    EXPECT_EQ(std::max_element(res.tci.begin(), res.tci.end()) - res.tci.begin(), 2);
    EXPECT_GE(stats::pearson(res.tci, res.avg_diversity), 0.0);
    EXPECT_EQ(res.ubiquity, (std::vector<int>{3, 2, 1}));
    EXPECT_EQ(res.avg_diversity, (std::vector<double>{2.0, 2.5, 3.0}));
}

TEST(TciEigen, NestedFrozenValues) {
    // Frozen from the dense oracle: lambda = (1, 1/4, 1/9), second
    // eigenvector standardizes to (-sqrt(3/2), 0, sqrt(3/2)).
    const auto res = tci_eigen(net(kNested));
    EXPECT_NEAR(res.diagnostics.eigenvalue1, 1.0, 1e-14);
    EXPECT_NEAR(res.diagnostics.eigenvalue2, 0.25, 1e-14);
    EXPECT_NEAR(res.diagnostics.eigenvalue3, 1.0 / 9.0, 1e-14);
    EXPECT_NEAR(res.diagnostics.spectral_gap, 0.25 - 1.0 / 9.0, 1e-14);
    EXPECT_NEAR(res.tci[0], -std::sqrt(1.5), 1e-12);
    EXPECT_NEAR(res.tci[1], 0.0, 1e-12);
    EXPECT_NEAR(res.tci[2], std::sqrt(1.5), 1e-12);
    EXPECT_NEAR(res.tci_scaled[0], 0.0, 1e-12);
    EXPECT_NEAR(res.tci_scaled[1], 50.0, 1e-10);
    EXPECT_NEAR(res.tci_scaled[2], 100.0, 1e-12);
}

TEST(TciEigen, StandardizationAndScalingInvariants) {
    std::mt19937_64 rng(24);
    int ran = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = net(oracle::random_connected(rng, 2 + rng() % 29, 2 + rng() % 19, 0.3));
        ComplexityResult res;
        try {
            res = tci_eigen(m);
        } catch (const DegenerateSpectrumError&) {
            continue;
        }
        ++ran;
        EXPECT_NEAR(mean(res.tci), 0.0, 1e-9);
        EXPECT_NEAR(pop_sd(res.tci), 1.0, 1e-9);
        EXPECT_EQ(*std::min_element(res.tci_scaled.begin(), res.tci_scaled.end()), 0.0);
        EXPECT_EQ(*std::max_element(res.tci_scaled.begin(), res.tci_scaled.end()), 100.0);
        EXPECT_LT(res.diagnostics.residual_norm, 1e-9);
        EXPECT_GE(res.diagnostics.eigenvalue3, -1e-12);
        if (res.actors.size() > 1 && pop_sd(res.actor_index) > 0) {
            EXPECT_NEAR(mean(res.actor_index), 0.0, 1e-9);
        }
    }
    EXPECT_GT(ran, 150);
}

TEST(TciEigen, AgreesWithDenseOracle) {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 200; ++trial) {
        const auto dense = oracle::random_connected(rng, 2 + rng() % 29, 3 + rng() % 18, 0.35);
        const auto oracle = oracle::dense_tci(dense);
        if (oracle.eigenvalues[1] - oracle.eigenvalues[2] < 1e-6) continue;
        const auto res = tci_eigen(net(dense));
        EXPECT_LT(oracle::aligned_max_diff(res.tci, oracle.tci), 1e-8) << "trial " << trial;
    }
}

TEST(TciEigen, ActorIndexIsActorSideEigenvector) {
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 30; ++trial) {
        const auto dense = oracle::random_connected(rng, 4 + rng() % 12, 3 + rng() % 8, 0.4);
        const auto m = net(dense);
        ComplexityResult res;
        try {
            res = tci_eigen(m);
        } catch (const DegenerateSpectrumError&) {
            continue;
        }
        // Check  R_actor x = lambda2 x  on the unstandardized direction.
        const auto r = actor_reduced_matrix(m);
        const double l2 = res.diagnostics.eigenvalue2;
        const std::vector<double>& x = res.actor_index;
        // Standardizing adds a constant, which R maps to itself, so
        // R x - lambda2 x must be constant.
        std::vector<double> d(x.size());
        for (std::size_t a = 0; a < x.size(); ++a) {
            double y = 0.0;
            for (std::size_t b = 0; b < x.size(); ++b) y += r[a][b] * x[b];
            d[a] = y - l2 * x[a];
        }
        for (double v : d) EXPECT_NEAR(v, d[0], 1e-8);
    }
}

TEST(TciEigen, IdentityTwoByTwoIsRefused) {
    // Identity is disconnected; the eigen-level degeneracy shows once the
    // connectivity guard is bypassed.
    EXPECT_THROW(tci_eigen(net({{1, 0}, {0, 1}})), DisconnectedNetworkError);
    TciOptions opts;
    opts.largest_component = true;
    EXPECT_THROW(tci_eigen(net({{1, 0}, {0, 1}}), opts), DegenerateSpectrumError);
    const auto r = reduced_matrix(net({{1, 0}, {0, 1}}));
    const auto eig = linalg::jacobi_eigen(r);
    EXPECT_NEAR(eig.values[0], eig.values[1], 1e-15);
}

TEST(TciEigen, DegenerateGap) {
    // All-ones: every non-leading eigenvalue is 0.
    EXPECT_THROW(tci_eigen(net({{1, 1, 1}, {1, 1, 1}})), DegenerateSpectrumError);
    // Star-like symmetric network: lambda2 == lambda3.
    EXPECT_THROW(tci_eigen(net({{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}})), DegenerateSpectrumError);
}

TEST(TciEigen, DisconnectedRefusedOrLargestComponent) {
    const IntMatrix two{{1, 1, 0, 0, 0}, {1, 0, 0, 0, 0}, {0, 0, 1, 1, 1}, {0, 0, 1, 1, 0}, {0, 0, 1, 0, 0}};
    try {
        tci_eigen(net(two));
        FAIL();
    } catch (const DisconnectedNetworkError& e) {
        EXPECT_EQ(e.components(), 2u);
        EXPECT_NE(std::string(e.what()).find("2/2 3/3"), std::string::npos) << e.what();
    }
    TciOptions opts;
    opts.largest_component = true;
    const auto res = tci_eigen(net(two), opts);
    EXPECT_EQ(res.categories, (std::vector<std::string>{"t0002", "t0003", "t0004"}));
    EXPECT_EQ(res.absent_categories, (std::vector<std::string>{"t0000", "t0001"}));
    EXPECT_EQ(res.absent_actors, (std::vector<std::string>{"a0000", "a0001"}));
    EXPECT_EQ(res.diagnostics.component_count, 2u);
    const auto alone = tci_eigen(net(kNested));
    EXPECT_LT(oracle::aligned_max_diff(res.tci, alone.tci), 1e-12);
}

TEST(TciEigen, PowerIterationPathMatchesDense) {
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 20; ++trial) {
        const auto dense = oracle::random_connected(rng, 10 + rng() % 20, 5 + rng() % 15, 0.35);
        const auto oracle = oracle::dense_tci(dense);
        if (oracle.eigenvalues[1] - oracle.eigenvalues[2] < 1e-3) continue;
        TciOptions opts;
        opts.dense_limit = 0;
        const auto res = tci_eigen(net(dense), opts);
        EXPECT_EQ(res.diagnostics.method, "power");
        EXPECT_LT(oracle::aligned_max_diff(res.tci, oracle.tci), 1e-8);
        const auto ref = tci_eigen(net(dense));
        EXPECT_LT(oracle::aligned_max_diff(res.tci, ref.tci), 1e-8);
        // Same orientation rule, so no flip is needed between paths.
        for (std::size_t t = 0; t < res.tci.size(); ++t) EXPECT_NEAR(res.tci[t], ref.tci[t], 1e-8);
    }
}

TEST(TciEigen, PermutationEquivariance) {
    std::mt19937_64 rng(28);
    for (int trial = 0; trial < 30; ++trial) {
        const auto dense = oracle::random_connected(rng, 6 + rng() % 10, 4 + rng() % 8, 0.4);
        const std::size_t na = dense.size(), nt = dense[0].size();
        std::vector<std::string> an, tn;
        for (std::size_t a = 0; a < na; ++a) an.push_back("A" + std::to_string(100 + a));
        for (std::size_t t = 0; t < nt; ++t) tn.push_back("T" + std::to_string(100 + t));
        ComplexityResult base;
        try {
            base = tci_eigen(SpecializationMatrix::from_dense(an, tn, dense));
        } catch (const DegenerateSpectrumError&) {
            continue;
        }
        std::vector<std::size_t> pa(na), pt(nt);
        std::iota(pa.begin(), pa.end(), 0);
        std::iota(pt.begin(), pt.end(), 0);
        std::shuffle(pa.begin(), pa.end(), rng);
        std::shuffle(pt.begin(), pt.end(), rng);
        IntMatrix perm(na, std::vector<int>(nt));
        std::vector<std::string> an2(na), tn2(nt);
        for (std::size_t a = 0; a < na; ++a) {
            an2[a] = an[pa[a]];
            for (std::size_t t = 0; t < nt; ++t) perm[a][t] = dense[pa[a]][pt[t]];
        }
        for (std::size_t t = 0; t < nt; ++t) tn2[t] = tn[pt[t]];
        const auto res = tci_eigen(SpecializationMatrix::from_dense(an2, tn2, perm));
        for (std::size_t t = 0; t < nt; ++t) {
            const auto j = std::find(base.categories.begin(), base.categories.end(), res.categories[t]) -
                           base.categories.begin();
            EXPECT_NEAR(res.tci[t], base.tci[j], 1e-9);
        }
    }
}

TEST(TciEigen, SignRuleIsDeterministic) {
    std::mt19937_64 rng(29);
    const auto m = net(oracle::random_connected(rng, 20, 12, 0.3));
    const auto a = tci_eigen(m);
    const auto b = tci_eigen(m);
    EXPECT_EQ(a.tci, b.tci);
    EXPECT_EQ(a.actor_index, b.actor_index);
}

// ---- tci_reflect_limit --------------------------------------------------------

TEST(ReflectLimit, NestedMatchesEigen) {
    const auto x = tci_reflect_limit(net(kNested));
    const auto e = tci_eigen(net(kNested));
    for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(x[t], e.tci[t], 1e-9);
}

TEST(ReflectLimit, AllOnesIsDegenerate) {
    EXPECT_THROW(tci_reflect_limit(net({{1, 1, 1}, {1, 1, 1}})), DegenerateSpectrumError);
}

TEST(ReflectLimit, RankAgreementWithEigen) {
    std::mt19937_64 rng(30);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto dense = oracle::random_connected(rng, 3 + rng() % 28, 3 + rng() % 18, 0.3);
        const auto m = net(dense);
        ComplexityResult e;
        try {
            e = tci_eigen(m);
        } catch (const DegenerateSpectrumError&) {
            continue;
        }
        if (e.diagnostics.spectral_gap <= 1e-3) continue;
        const auto x = tci_reflect_limit(m);
        EXPECT_EQ(stats::spearman(oracle::snapped(x), oracle::snapped(e.tci)), 1.0) << "trial " << trial;
        for (std::size_t t = 0; t < x.size(); ++t) EXPECT_NEAR(x[t], e.tci[t], 1e-8);
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(ReflectLimit, EscapesStartWithoutSecondComponent) {
    // K_{T,0} = (2, 1, 3) is orthogonal to the second eigenvector here, so
    // plain iteration would settle on the third one (0, 1, -1) direction.
    const auto m = net({{1, 0, 1}, {0, 1, 1}, {0, 0, 1}, {1, 0, 0}});
    const auto e = tci_eigen(m);
    EXPECT_NEAR(e.diagnostics.eigenvalue2, 2.0 / 3.0, 1e-14);
    EXPECT_NEAR(e.diagnostics.eigenvalue3, 0.25, 1e-14);
    const auto x = tci_reflect_limit(m);
    for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(x[t], e.tci[t], 1e-9);
}

TEST(ReflectLimit, NonConvergenceCarriesResidual) {
    std::mt19937_64 rng(31);
    const auto m = net(oracle::random_connected(rng, 20, 12, 0.3));
    ReflectLimitOptions opts;
    opts.max_order = 2;
    try {
        tci_reflect_limit(m, opts);
        FAIL();
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(ReflectLimit, DisconnectedRefused) {
    EXPECT_THROW(tci_reflect_limit(net(kIdentity3)), DisconnectedNetworkError);
}

// ---- scaling ------------------------------------------------------------------

TEST(Scale, Examples) {
    EXPECT_EQ(scale_0_100(std::vector<double>{-1, 0, 1}), (std::vector<double>{0, 50, 100}));
    EXPECT_THROW(scale_0_100(std::vector<double>{5, 5, 5}), ArgumentError);
}

TEST(Standardize, PopulationStdev) {
    const auto z = standardize(std::vector<double>{1, 2, 3, 4});
    EXPECT_NEAR(pop_sd(z), 1.0, 1e-15);
    EXPECT_NEAR(z[0], -1.5 / std::sqrt(1.25), 1e-15);
    EXPECT_THROW(standardize(std::vector<double>{2, 2}), ArgumentError);
}

// ---- eigensolvers -----------------------------------------------------------

TEST(Jacobi, MatchesEigenSelfAdjointSolver) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 40);
        linalg::Dense a(n, std::vector<double>(n));
        Eigen::MatrixXd e(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                a[i][j] = a[j][i] = oracle::uniform01(rng) * 2 - 1;
                e(i, j) = e(j, i) = a[i][j];
            }
        }
        const auto mine = linalg::jacobi_eigen(a);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(e);
        for (int k = 0; k < n; ++k) {
            EXPECT_NEAR(mine.values[k], ref.eigenvalues()(n - 1 - k), 1e-12);
            // A v = lambda v
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += a[i][j] * mine.vectors[k][j];
                EXPECT_NEAR(s, mine.values[k] * mine.vectors[k][i], 1e-11);
            }
        }
    }
}
