#pragma once
// Small fixed-size numeric helpers shared across the library: a cyclic
// Jacobi eigensolver for symmetric 4x4 matrices, Gaussian elimination for
// the tiny linear systems of the support-enumeration game solver, and 2-D
// convex hulls (monotone chain) with point-membership tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace qpd {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

inline double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline Vec4 mat_vec(const Mat4& m, const Vec4& v) {
  return {dot(m[0], v), dot(m[1], v), dot(m[2], v), dot(m[3], v)};
}

// x^T M y
inline double quad_form(const Vec4& x, const Mat4& m, const Vec4& y) {
  return dot(x, mat_vec(m, y));
}

struct SymmetricEigen {
  Vec4 values;                   // ascending
  std::array<Vec4, 4> vectors;   // vectors[k] belongs to values[k], unit norm
};

// Cyclic Jacobi rotations; converges to machine precision in a few sweeps
// for 4x4 symmetric input.
inline SymmetricEigen eigen_symmetric(Mat4 a) {
  std::array<Vec4, 4> v{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-28) break;
    for (int p = 0; p < 4; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double phi = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (phi >= 0 ? 1.0 : -1.0) /
                         (std::abs(phi) + std::sqrt(phi * phi + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 4; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 4; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::array<int, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return a[x][x] < a[y][y]; });
  SymmetricEigen out;
  for (int k = 0; k < 4; ++k) {
    out.values[k] = a[order[k]][order[k]];
    for (int row = 0; row < 4; ++row) out.vectors[k][row] = v[row][order[k]];
  }
  return out;
}

// Solve the n x n system a*x = b (row-major a) by Gaussian elimination with
// partial pivoting. Returns false when the system is (near-)singular.
inline bool solve_dense(std::vector<double> a, std::vector<double> b, int n,
                        std::vector<double>& x) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col])) pivot = row;
    if (std::abs(a[pivot * n + col]) < 1e-12) return false;
    if (pivot != col) {
      for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      std::swap(b[col], b[pivot]);
    }
    for (int row = col + 1; row < n; ++row) {
      const double f = a[row * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) a[row * n + k] -= f * a[col * n + k];
      b[row] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (int row = n - 1; row >= 0; --row) {
    double acc = b[row];
    for (int k = row + 1; k < n; ++k) acc -= a[row * n + k] * x[k];
    x[row] = acc / a[row * n + row];
  }
  return true;
}

struct Point2 {
  double x = 0.0, y = 0.0;
};

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Convex hull in counter-clockwise order starting from the lexicographically
// smallest point. Collinear points are dropped, so only strict corners
// remain; the result is independent of the input order.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts,
                                       double collinear_eps = 1e-9) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) {
                          return std::abs(a.x - b.x) < 1e-12 &&
                                 std::abs(a.y - b.y) < 1e-12;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= collinear_eps)
      --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {  // upper chain
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= collinear_eps)
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double segment_distance(const Point2& a, const Point2& b, const Point2& q) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((q.x - a.x) * vx + (q.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = q.x - (a.x + t * vx), dy = q.y - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

// Membership in the closed convex region bounded by a CCW hull; `eps` gives
// the boundary some thickness so vertices/edges count as inside.
inline bool inside_convex_hull(const std::vector<Point2>& hull, const Point2& q,
                               double eps = 1e-9) {
  if (hull.empty()) return false;
  if (hull.size() == 1)
    return std::hypot(q.x - hull[0].x, q.y - hull[0].y) <= eps;
  if (hull.size() == 2) return segment_distance(hull[0], hull[1], q) <= eps;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, q) < -eps) return false;
  }
  return true;
}

}  // namespace qpd
