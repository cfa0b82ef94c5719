// Exits 0 iff dsyevd returns accurate eigenpairs for a 256 x 256 matrix.
#include <lapacke.h>

#include <cmath>
#include <vector>

int main() {
  const int n = 256;
  std::vector<double> a(n * n), v(n * n), w(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a[i + j * n] = a[j + i * n] = std::sin(0.37 * (i * n + j)) + (i == j ? 0.01 * i : 0.0);
  v = a;
  if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, v.data(), n, w.data()) != 0) return 1;
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      double r = -w[k] * v[i + k * n];
      for (int j = 0; j < n; ++j) r += a[i + j * n] * v[j + k * n];
      worst = std::fmax(worst, std::fabs(r));
    }
  return worst < 1e-9 ? 0 : 1;
}
