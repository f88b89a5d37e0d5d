#include <doctest.h>

#include <cmath>

#include "delmdp/envs.hpp"
#include "delmdp/mdp.hpp"

using namespace delmdp;

namespace {

double l1_row_distance(const Mdp& m, State x, Action a, State x2, Action a2) {
    double s = 0.0;
    for (State y = 0; y < m.num_states; ++y)
        s += std::fabs(m.p(x, a, y) - m.p(x2, a2, y));
    return s;
}

double embed_distance(const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("two-cluster S=4, eps=0.1: transition and reward tables") {
    auto inst = make_two_cluster({4, 0.1, 0.1, 42});
    const Mdp& m = inst.mdp;
    // move from cluster 1 lands on each cluster-2 state w.p. 0.45
    CHECK(m.p(0, 1, 2) == doctest::Approx(0.45));
    CHECK(m.p(0, 1, 3) == doctest::Approx(0.45));
    CHECK(m.p(0, 1, 0) == doctest::Approx(0.05));
    CHECK(m.p(0, 1, 1) == doctest::Approx(0.05));
    // stay redraws within the cluster
    CHECK(m.p(0, 0, 0) == doctest::Approx(0.45));
    CHECK(m.p(0, 0, 1) == doctest::Approx(0.45));
    // reward rule: r(x, move) = 1 exactly on cluster 1
    CHECK(m.r(0, 1) == 1.0);
    CHECK(m.r(1, 1) == 1.0);
    CHECK(m.r(2, 1) == 0.0);
    CHECK(m.r(0, 0) == 0.0);

    for (State x = 0; x < 4; ++x)
        for (Action a = 0; a < 2; ++a) {
            double sum = 0.0;
            for (State y = 0; y < 4; ++y) sum += m.p(x, a, y);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        }
    CHECK(validate_mdp(m).ergodicity == ErgodicityVerdict::ProvenErgodic);
    CHECK(inst.structure.kind == StructureKind::Lipschitz);
    CHECK(inst.structure.L == 2.0);
}

TEST_CASE("two-cluster embeddings live in the declared intervals") {
    auto inst = make_two_cluster({8, 0.1, 0.1, 5});
    for (State x = 0; x < 4; ++x) {
        CHECK(inst.mdp.state_embedding[x][0] >= -0.1);
        CHECK(inst.mdp.state_embedding[x][0] <= 0.0);
    }
    for (State x = 4; x < 8; ++x) {
        CHECK(inst.mdp.state_embedding[x][0] >= 1.0);
        CHECK(inst.mdp.state_embedding[x][0] <= 1.1);
    }
    CHECK(inst.mdp.action_embedding[0][0] == 0.0);
    CHECK(inst.mdp.action_embedding[1][0] == 1.0);
}

TEST_CASE("two-cluster generation is deterministic given the seed") {
    auto a = make_two_cluster({6, 0.2, 0.3, 77});
    auto b = make_two_cluster({6, 0.2, 0.3, 77});
    CHECK(a.mdp.transitions == b.mdp.transitions);
    CHECK(a.mdp.reward_means == b.mdp.reward_means);
    CHECK(a.mdp.state_embedding == b.mdp.state_embedding);
    auto c = make_two_cluster({6, 0.2, 0.3, 78});
    CHECK(a.mdp.state_embedding != c.mdp.state_embedding);
}

TEST_CASE("same-cluster same-action kernels coincide") {
    auto inst = make_two_cluster({12, 0.1, 0.1, 9});
    for (Action a = 0; a < 2; ++a) {
        CHECK(l1_row_distance(inst.mdp, 0, a, 5, a) == 0.0);
        CHECK(l1_row_distance(inst.mdp, 6, a, 11, a) == 0.0);
    }
}

TEST_CASE("two-cluster MDPs satisfy (L1)-(L2) with L = L' = 2 exhaustively") {
    for (std::size_t S : {4u, 8u, 12u, 16u, 20u}) {
        auto inst = make_two_cluster({S, 0.1, 0.1, S});
        const Mdp& m = inst.mdp;
        for (State x = 0; x < S; ++x)
            for (Action a = 0; a < 2; ++a)
                for (State x2 = 0; x2 < S; ++x2)
                    for (Action a2 = 0; a2 < 2; ++a2) {
                        double budget =
                            2.0 * embed_distance(m.state_embedding[x],
                                                 m.state_embedding[x2]) +
                            2.0 * embed_distance(m.action_embedding[a],
                                                 m.action_embedding[a2]);
                        CHECK(l1_row_distance(m, x, a, x2, a2) <= budget + 1e-12);
                        CHECK(std::fabs(m.r(x, a) - m.r(x2, a2)) <= budget + 1e-12);
                    }
    }
}

TEST_CASE("two-cluster rejects invalid parameters") {
    CHECK_THROWS_AS(make_two_cluster({5, 0.1, 0.1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(make_two_cluster({4, 0.6, 0.1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(make_two_cluster({4, 0.1, 1.5, 0}), std::invalid_argument);
}

TEST_CASE("make_random_ergodic: floor, verdict, reproducibility, row sums") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Mdp m = make_random_ergodic(3, 2, seed, 1.0 / 6.0);
        for (State x = 0; x < 3; ++x)
            for (Action a = 0; a < 2; ++a) {
                double sum = 0.0;
                for (State y = 0; y < 3; ++y) {
                    CHECK(m.p(x, a, y) >= 1.0 / 6.0 - 1e-12);
                    sum += m.p(x, a, y);
                }
                CHECK(std::fabs(sum - 1.0) <= 1e-12);
                CHECK(m.r(x, a) >= 0.0);
                CHECK(m.r(x, a) <= 1.0);
            }
        CHECK(validate_mdp(m).ergodicity == ErgodicityVerdict::ProvenErgodic);
    }
    Mdp a = make_random_ergodic(3, 2, 4, 0.1);
    Mdp b = make_random_ergodic(3, 2, 4, 0.1);
    CHECK(a.transitions == b.transitions);
    CHECK(a.reward_means == b.reward_means);
    CHECK_THROWS_AS(make_random_ergodic(4, 2, 0, 0.3), std::invalid_argument);
}

TEST_CASE("sample_step: one-hot rows are deterministic") {
    Mdp m = Mdp::zeros(3, 1);
    m.p(0, 0, 2) = 1.0;
    m.p(1, 0, 0) = 1.0;
    m.p(2, 0, 1) = 1.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        CHECK(sample_step(m, 0, 0, rng).y == 2);
    }
}

TEST_CASE("sample_step: Bernoulli mean concentrates at 0.5 over 1e5 draws") {
    Mdp m = Mdp::zeros(1, 1);
    m.p(0, 0, 0) = 1.0;
    m.r(0, 0) = 0.5;
    Rng rng(2024);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += sample_step(m, 0, 0, rng).r;
    CHECK(std::fabs(sum / n - 0.5) <= 0.006);  // ~4 sigma
}

TEST_CASE("sample_step: identical seeds give identical streams") {
    auto inst = make_two_cluster({4, 0.1, 0.1, 3});
    Rng r1(5), r2(5);
    for (int i = 0; i < 200; ++i) {
        auto t1 = sample_step(inst.mdp, i % 4, i % 2, r1);
        auto t2 = sample_step(inst.mdp, i % 4, i % 2, r2);
        CHECK(t1.y == t2.y);
        CHECK(t1.r == t2.r);
    }
}

TEST_CASE("attach_random_embeddings is uniform-dimension and seeded") {
    Mdp m = make_random_ergodic(4, 3, 1, 0.05);
    attach_random_embeddings(m, 2, 1, 9);
    CHECK(m.state_embedding.size() == 4);
    CHECK(m.state_embedding[0].size() == 2);
    CHECK(m.action_embedding.size() == 3);
    CHECK(validate_mdp(m).ok());
    Mdp m2 = make_random_ergodic(4, 3, 1, 0.05);
    attach_random_embeddings(m2, 2, 1, 9);
    CHECK(m.state_embedding == m2.state_embedding);
}
