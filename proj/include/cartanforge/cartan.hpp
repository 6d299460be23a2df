#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cartanforge/linalg.hpp"

namespace cf {

enum class Parity : uint8_t { Even = 0, Odd = 1 };

// Diagonal marks. two/od/ev live on even nodes (field values 2, 1, 0),
// one/zero on odd nodes (1, 0). At p = 2 even nodes carry {ev, od} only.
enum class Mark : uint8_t { Two = 0, Od = 1, Ev = 2, One = 3, Zero = 4 };

Scalar mark_value(Mark m, int p);
const char* mark_token(Mark m);

// Normalized Cartan matrix with parity vector and characteristic.
struct CartanSpec {
  int p = 0;
  int n = 0;
  Mat entries;                  // n x n, diagonal stored as field values
  std::vector<Parity> parity;
  std::vector<Mark> diag;
  bool parametric = false;

  const Scalar& at(int i, int j) const { return entries.at(i, j); }
  bool free_row(int i) const { return diag[i] == Mark::Ev || diag[i] == Mark::Zero; }
  bool operator==(const CartanSpec& o) const;
  bool operator!=(const CartanSpec& o) const { return !(*this == o); }
};

// Rescales rows so the diagonal satisfies the mark convention (even nonzero
// diagonal becomes 2 for p > 2 and od for p = 2; odd nonzero becomes 1), then
// rescales zero-diagonal rows to symmetrize the matrix when that is possible
// within the remaining freedom. Idempotent.
CartanSpec normalize(const Mat& raw, const std::vector<Parity>& parity, int p);

// Connectivity of the off-diagonal adjacency graph.
bool is_indecomposable(const CartanSpec& s);

// Diagonal D (returned as its diagonal vector, D_1 = 1) with DA symmetric,
// or nullopt when no symmetrizer exists. Requires an indecomposable spec.
std::optional<std::vector<Scalar>> symmetrizer(const CartanSpec& s);

// Distinguished representative of the equivalence class under simultaneous
// row/column permutation (carrying parities along) and rescaling of rows with
// zero diagonal. Equal canonical forms characterize equivalence. n <= 10.
CartanSpec canonical_form(const CartanSpec& s);

// Rows form a basis of {v : v A = 0} in reduced row echelon form (l x n).
Mat left_kernel(const CartanSpec& s);

// l x n matrix of standard coordinate rows e_j, greedily chosen at the
// smallest indices j that complete rank(A) to n.
Mat grading_completion(const CartanSpec& s);

// JSON round trip; input is normalized on load.
std::string spec_to_json(const CartanSpec& s);
CartanSpec spec_from_json(const std::string& text);

}  // namespace cf
