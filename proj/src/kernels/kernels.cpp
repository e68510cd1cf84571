#include "conecert/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace conecert::kernels {

int max_threads() {
  static const int cap = [] {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("CONECERT_THREADS")) {
      try {
        int c = std::stoi(env);
        if (c > 0) n = std::min(n, c);
      } catch (...) {
      }
    }
    return std::max(n, 1);
  }();
  return cap;
}

void logdet_hessian(const SymBasis<double>& basis, const Mat& t, Mat& h) {
  const long n = static_cast<long>(basis.size());
  const long m = t.rows();
  h.resize(n, n);
  // U_p = T Λ_p T, then H_pq = Σ_{(c,d,w)∈q} w U_p(d,c)
#pragma omp parallel num_threads(max_threads())
  {
    Mat tl(m, m);
    Mat u(m, m);
#pragma omp for schedule(dynamic)
    for (long p = 0; p < n; ++p) {
      tl.setZero();
      for (const auto& e : basis[p]) tl.col(e.j) += e.v * t.col(e.i);
      u.noalias() = tl * t;
      for (long q = 0; q < n; ++q) {
        double s = 0.0;
        for (const auto& e : basis[q]) s += e.v * u(e.j, e.i);
        h(p, q) = s;
      }
    }
  }
  h = 0.5 * (h + h.transpose()).eval();
}

Mat congruence_serial(const Mat& a, const Mat& h) { return a * h * a.transpose(); }

Mat congruence(const Mat& a, const Mat& h) {
  const long m = a.rows();
  Mat ah = a * h;
  Mat out(m, m);
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
  for (long i = 0; i < m; ++i)
    for (long j = 0; j <= i; ++j) {
      double s = ah.row(i).dot(a.row(j));
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

}  // namespace conecert::kernels
