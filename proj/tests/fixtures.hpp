#pragma once

#include "delmdp/mdp.hpp"

namespace fixtures {

inline constexpr delmdp::Action kStay = 0;
inline constexpr delmdp::Action kGo = 1;

// Two states, two actions; go switches state with probability 0.9, stay with
// probability 0.1; the only reward is r(1, stay) = 1. All planning
// quantities are exact rationals: g* = 0.9, h* = (0, 1).
inline delmdp::Mdp make_m2() {
    delmdp::Mdp m = delmdp::Mdp::zeros(2, 2);
    m.p(0, kStay, 0) = 0.9;
    m.p(0, kStay, 1) = 0.1;
    m.p(0, kGo, 0) = 0.1;
    m.p(0, kGo, 1) = 0.9;
    m.p(1, kStay, 0) = 0.1;
    m.p(1, kStay, 1) = 0.9;
    m.p(1, kGo, 0) = 0.9;
    m.p(1, kGo, 1) = 0.1;
    m.r(1, kStay) = 1.0;
    m.state_embedding = {{0.0}, {1.0}};
    m.action_embedding = {{0.0}, {1.0}};
    return m;
}

// Every action has identical kernel and reward; all actions are optimal.
inline delmdp::Mdp make_identical_actions(std::size_t S = 3, std::size_t A = 3) {
    delmdp::Mdp m = delmdp::Mdp::zeros(S, A);
    for (std::size_t x = 0; x < S; ++x)
        for (std::size_t a = 0; a < A; ++a) {
            for (std::size_t y = 0; y < S; ++y) m.p(x, a, y) = 1.0 / static_cast<double>(S);
            m.r(x, a) = static_cast<double>(x) / static_cast<double>(2 * S);
        }
    return m;
}

}  // namespace fixtures
