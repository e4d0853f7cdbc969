#pragma once

#include <stdexcept>
#include <vector>

namespace vertframe {

// Dense little matrix over any field-like scalar (Rational, Expr, double).
// Sizes stay tiny (<= 4ish), so determinants use cofactor expansion.
template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, T{}) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = T(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& at(int r, int c) { return a_[index(r, c)]; }
  const T& at(int r, int c) const { return a_[index(r, c)]; }

  Mat transpose() const {
    Mat out(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out.at(c, r) = at(r, c);
    return out;
  }

  friend Mat operator+(const Mat& x, const Mat& y) {
    x.require_same_shape(y);
    Mat out = x;
    for (size_t i = 0; i < out.a_.size(); ++i) out.a_[i] = out.a_[i] + y.a_[i];
    return out;
  }

  friend Mat operator-(const Mat& x, const Mat& y) {
    x.require_same_shape(y);
    Mat out = x;
    for (size_t i = 0; i < out.a_.size(); ++i) out.a_[i] = out.a_[i] - y.a_[i];
    return out;
  }

  Mat operator-() const {
    Mat out = *this;
    for (auto& v : out.a_) v = -v;
    return out;
  }

  friend Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols_ != y.rows_) throw std::invalid_argument("matrix shape mismatch in product");
    Mat out(x.rows_, y.cols_);
    for (int r = 0; r < x.rows_; ++r)
      for (int c = 0; c < y.cols_; ++c) {
        T acc{};
        for (int m = 0; m < x.cols_; ++m) acc = acc + x.at(r, m) * y.at(m, c);
        out.at(r, c) = acc;
      }
    return out;
  }

  Mat scaled(const T& s) const {
    Mat out = *this;
    for (auto& v : out.a_) v = v * s;
    return out;
  }

  T trace() const {
    require_square();
    T acc{};
    for (int i = 0; i < rows_; ++i) acc = acc + at(i, i);
    return acc;
  }

  T det() const {
    require_square();
    if (rows_ == 0) return T(1);
    if (rows_ == 1) return at(0, 0);
    if (rows_ == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    T acc{};
    for (int c = 0; c < cols_; ++c) {
      T term = at(0, c) * minor_matrix(0, c).det();
      if (c % 2 == 0)
        acc = acc + term;
      else
        acc = acc - term;
    }
    return acc;
  }

  // Transposed cofactor matrix; identity adj(M)*M = det(M)*I.
  Mat adjugate() const {
    require_square();
    Mat out(rows_, cols_);
    if (rows_ == 0) return out;
    if (rows_ == 1) {
      out.at(0, 0) = T(1);
      return out;
    }
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) {
        T cof = minor_matrix(r, c).det();
        if ((r + c) % 2 != 0) cof = -cof;
        out.at(c, r) = cof;
      }
    return out;
  }

  Mat inverse() const {
    T d = det();
    if (d == T{}) throw std::domain_error("singular matrix");
    Mat adj = adjugate();
    for (auto& v : adj.a_) v = v / d;
    return adj;
  }

  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

 private:
  size_t index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
      throw std::out_of_range("matrix index out of range");
    return size_t(r) * cols_ + c;
  }

  void require_square() const {
    if (rows_ != cols_) throw std::invalid_argument("matrix must be square");
  }

  void require_same_shape(const Mat& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
      throw std::invalid_argument("matrix shape mismatch");
  }

  Mat minor_matrix(int dr, int dc) const {
    Mat out(rows_ - 1, cols_ - 1);
    for (int r = 0, ro = 0; r < rows_; ++r) {
      if (r == dr) continue;
      for (int c = 0, co = 0; c < cols_; ++c) {
        if (c == dc) continue;
        out.at(ro, co) = at(r, c);
        ++co;
      }
      ++ro;
    }
    return out;
  }

  int rows_ = 0, cols_ = 0;
  std::vector<T> a_;
};

// Exact rank by Gaussian elimination; only meaningful for exact scalars.
template <class T>
int rank_of(Mat<T> m) {
  int rank = 0;
  for (int c = 0; c < m.cols() && rank < m.rows(); ++c) {
    int pivot = -1;
    for (int r = rank; r < m.rows(); ++r)
      if (!(m.at(r, c) == T{})) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    for (int cc = 0; cc < m.cols(); ++cc) std::swap(m.at(pivot, cc), m.at(rank, cc));
    for (int r = rank + 1; r < m.rows(); ++r) {
      if (m.at(r, c) == T{}) continue;
      T factor = m.at(r, c) / m.at(rank, c);
      for (int cc = c; cc < m.cols(); ++cc) m.at(r, cc) = m.at(r, cc) - factor * m.at(rank, cc);
    }
    ++rank;
  }
  return rank;
}

}  // namespace vertframe
