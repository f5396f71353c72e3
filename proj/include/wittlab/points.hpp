#pragma once
// Pointwise evaluation of the display complexes on finite test rings:
// C_n (the two-term gamma complex over W_n), Z_n (the gamma complex with
// coordinates in the F^n-torsion of the sparse Witt ideal, shifted), and
// sC_n (the p^n-cone over the sheared section complex), plus the exact
// triangle relating them, the two-square duality diagram, and point-count
// tables.  All cohomology is computed by full enumeration of the carriers.

#include <optional>

#include "wittlab/frame_instances.hpp"
#include "wittlab/frames.hpp"
#include "wittlab/linalg.hpp"

namespace wittlab {

struct TestRing {
  RingPtr S;
  RingHom from_base;  // R -> S, verified
  std::string id;
  std::size_t budget = (std::size_t(1) << 20);
};

// structure map along the unique map from the prime field R = F_p
TestRing make_test_ring(const RingPtr& R, const RingPtr& S, std::string id,
                        std::size_t budget = (std::size_t(1) << 20));
TestRing make_test_ring(const RingHom& f, std::string id,
                        std::size_t budget = (std::size_t(1) << 20));

struct PointReport {
  std::string complex;  // "C" | "Z" | "sC"
  std::string window_id, ring_id;
  u64 n = 0;
  std::size_t precision = 0;  // lambda precision at acceptance (sheared only)
  std::size_t support = 0;    // sparse support bound at acceptance
  std::vector<u64> hm1_inv, h0_inv, h1_inv;  // invariant factor exponents
  bigint hm1_order = 1, h0_order = 1, h1_order = 1;
  std::vector<std::string> trace;  // one entry per truncation level
  bool stabilized = true;
  double wall_ms = 0;
  nlohmann::json to_json() const;
};

// m over a truncated Witt frame (kind "witt-n"); finite in one shot
PointReport eval_Cn(const Window& m, const TestRing& T, std::string window_id = "");

// m over a truncated Witt frame; exact sparse arithmetic on the subgroups
// generated by F^n-torsion vectors of increasing support, until the
// invariants repeat; trace recorded
PointReport eval_Zn(const Window& m, const TestRing& T, std::string window_id = "",
                    std::size_t support_start = 1, std::size_t support_max = 8);

// m over a sheared frame; p^n-cone of the section complex.  Over a reduced
// test ring the cone is evaluated through the n-truncated image window
// (the sparse part vanishes pointwise).  Otherwise the sparse part uses
// exact subgroup closures of growing support, and the residue part is an
// inverse limit: cohomology is the eventual image along precision
// truncations, computed on a ladder whose top never exceeds the precision
// of the window's frame.
PointReport eval_sCn(const Window& m, const TestRing& T, u64 n, std::string window_id = "",
                     std::size_t precision_start = 0, std::size_t support_start = 0,
                     std::size_t steps_max = 6);

struct TriangleReport {
  bool ok = true;
  std::vector<std::string> failures;
  PointReport z, c, sc;
  nlohmann::json to_json() const;
};
// m over a sheared frame; n-truncation handled internally.  Verifies the
// coefficient sequence 0 -> sW --Vt^n--> sW -> W_n -> 0 on points at the
// given truncation and the cohomology order identities of the triangle.
TriangleReport exact_triangle_check(const Window& m, const TestRing& T, u64 n,
                                    std::size_t precision, std::size_t support,
                                    std::string window_id = "");

struct DualityReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::vector<u64> c_h0_inv, c_h1_inv, cp_h0_inv, cp_h1_inv;
  bigint c_h0_order = 1, cp_h0_order = 1;
  nlohmann::json to_json() const;
};
// m over a truncated Witt frame; builds the two-square comparison diagram
// between the gamma complex and its rearranged form on S-points, checks
// commutativity, the kernel/cokernel behavior of the vertical maps, and
// equality of the homology of the two complexes.
DualityReport duality_diagram_check(const Window& m, const TestRing& T,
                                    std::string window_id = "");

struct TableCell {
  std::string window_id, ring_id;
  u64 n = 0;
  bool ok = false, budget_exceeded = false;
  bigint h0_order = 0;
  std::optional<bigint> oracle;
  bool oracle_match = true;
  std::string error;
};
struct PointTable {
  std::vector<TableCell> cells;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};
using OracleFn =
    std::function<std::optional<bigint>(const std::string& window_id, const TestRing&, u64 n)>;

// windows over sheared frames; one sC_n evaluation per (window, ring, n)
PointTable point_count_table(const std::vector<std::pair<std::string, Window>>& windows,
                             const std::vector<TestRing>& rings, u64 n_min, u64 n_max,
                             const OracleFn& oracle);

// --- enumerated-carrier helpers (exposed for tests and benchmarks) ----------

// all W_n(S) as an enumerated group
AbGroup witt_group(const RingPtr& S, std::size_t n, std::size_t budget);
// subgroup of sparse F^n-torsion vectors generated in support < L (exact)
AbGroup hat_torsion_group(const RingPtr& S, u64 n, std::size_t L, std::size_t budget);
// residue part W_N(k) times the exact subgroup of sparse vectors
// generated in support < L
AbGroup sheared_group(const SRingPtr& S, std::size_t L, std::size_t budget);
// product with concatenated encodings
AbGroup product_group(std::vector<AbGroup> parts, std::size_t budget);

// image table of f over all elements of g; `map_table` uses OpenMP when
// available, `map_table_serial` is the reference implementation
std::vector<Enc> map_table_serial(const AbGroup& g, const std::function<Enc(const Enc&)>& f);
std::vector<Enc> map_table(const AbGroup& g, const std::function<Enc(const Enc&)>& f);

}  // namespace wittlab
