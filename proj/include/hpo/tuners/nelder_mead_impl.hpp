#pragma once

#include <algorithm>
#include <numeric>

namespace hpo {

template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const std::vector<double>& lower,
                             const std::vector<double>& upper, double step, int max_iter, double tol) {
  const std::size_t d = x0.size();
  auto clamp = [&](std::vector<double> v) {
    for (std::size_t i = 0; i < d; ++i) v[i] = std::clamp(v[i], lower[i], upper[i]);
    return v;
  };
  std::vector<std::vector<double>> pts{clamp(x0)};
  for (std::size_t i = 0; i < d; ++i) {
    auto p = pts[0];
    const double span = upper[i] - lower[i];
    p[i] += (p[i] + step * span <= upper[i]) ? step * span : -step * span;
    pts.push_back(clamp(p));
  }
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i <= d; ++i) fv[i] = f(pts[i]);

  std::vector<std::size_t> idx(d + 1);
  int it = 0;
  for (; it < max_iter; ++it) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[d - 1];
    if (std::abs(fv[worst] - fv[best]) <= tol * (std::abs(fv[best]) + tol)) break;

    std::vector<double> c(d, 0.0);
    for (std::size_t k = 0; k <= d; ++k)
      if (k != worst)
        for (std::size_t i = 0; i < d; ++i) c[i] += pts[k][i] / static_cast<double>(d);
    auto along = [&](double t) {
      std::vector<double> p(d);
      for (std::size_t i = 0; i < d; ++i) p[i] = c[i] + t * (pts[worst][i] - c[i]);
      return clamp(p);
    };
    auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fv[best]) {
      auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      pts[worst] = std::move(xr);
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      auto xc = along(outside ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : fv[worst])) {
        pts[worst] = std::move(xc);
        fv[worst] = fc;
      } else {
        for (std::size_t k = 0; k <= d; ++k) {
          if (k == best) continue;
          for (std::size_t i = 0; i < d; ++i) pts[k][i] = pts[best][i] + 0.5 * (pts[k][i] - pts[best][i]);
          fv[k] = f(pts[k]);
        }
      }
    }
  }
  const auto b = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return {pts[b], fv[b], it};
}

}  // namespace hpo
