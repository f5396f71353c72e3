#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wittlab/frame_instances.hpp"
#include "wittlab/points.hpp"

namespace wittlab {

// Named rings, windows, and test-ring families used by the verification
// suites and the CLI.

// F_{p^m}; the minimal polynomial is found by search and verified
RingPtr corpus_field(u64 p, u64 m);
// k[t]/(t^j)
RingPtr corpus_nilpotent(const RingPtr& k, u64 j);
// F_p[x,y]/(x^2, xy, y^2)
RingPtr corpus_square_zero_plane(u64 p);

// ring by name: "F<q>", "F<q>[t]/t<j>", "F<p>[x,y]/(x,y)^2"
RingPtr corpus_ring(const std::string& name);
std::vector<std::string> corpus_ring_names();

// windows by name over a frame: unit, twist, ordinary (unit + twist),
// supersingular (r0 = r1 = 1, antidiagonal matrix)
std::vector<std::string> corpus_window_names();
Window corpus_window(const FramePtr& F, const std::string& name);

// test ring over a prime-field base with a descriptive id
TestRing corpus_test_ring(const RingPtr& base, const RingPtr& S, std::string id,
                          std::size_t budget = std::size_t(1) << 20);

// closed-form or brute-force |H0(sC_n)| for corpus windows; the
// supersingular count solves F(x) = V(x) on W_n(S) directly.  Only
// reduced test rings have oracles; otherwise nullopt.
std::optional<bigint> corpus_oracle(const std::string& window_id, const TestRing& T, u64 n);

}  // namespace wittlab
