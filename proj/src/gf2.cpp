#include "qdec/gf2.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace qdec {

BitVector BitVector::from_bits(const std::vector<int>& bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) v.set(i, true);
    return v;
}

std::size_t BitVector::weight() const {
    std::size_t w = 0;
    for (Word x : w_) w += std::popcount(x);
    return w;
}

bool BitVector::is_zero() const {
    for (Word x : w_) if (x) return false;
    return true;
}

BitVector& BitVector::operator^=(const BitVector& o) {
    if (len_ != o.len_) throw std::invalid_argument("BitVector xor: length mismatch");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
}

BitVector BitVector::slice(std::size_t lo, std::size_t len) const {
    if (lo + len > len_) throw std::out_of_range("BitVector::slice");
    BitVector out(len);
    for (std::size_t i = 0; i < len; ++i)
        if (get(lo + i)) out.set(i, true);
    return out;
}

void BitVector::assign_slice(std::size_t lo, const BitVector& src) {
    if (lo + src.size() > len_) throw std::out_of_range("BitVector::assign_slice");
    for (std::size_t i = 0; i < src.size(); ++i) set(lo + i, src.get(i));
}

std::string BitVector::to_string() const {
    std::string s(len_, '0');
    for (std::size_t i = 0; i < len_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows[0].size() : 0;
    BitMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw std::invalid_argument("from_rows: ragged rows");
        for (std::size_t j = 0; j < c; ++j)
            if (rows[i][j]) m.set(i, j, true);
    }
    return m;
}

void BitMatrix::xor_row_into(std::size_t src, std::size_t dst) {
    Word* d = data_.data() + dst * wpr_;
    const Word* s = data_.data() + src * wpr_;
    for (std::size_t i = 0; i < wpr_; ++i) d[i] ^= s[i];
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    Word* pa = data_.data() + a * wpr_;
    Word* pb = data_.data() + b * wpr_;
    for (std::size_t i = 0; i < wpr_; ++i) std::swap(pa[i], pb[i]);
}

BitVector BitMatrix::row_vector(std::size_t r) const {
    BitVector v(cols_);
    auto src = row(r);
    std::copy(src.begin(), src.end(), v.words().begin());
    return v;
}

void BitMatrix::set_row(std::size_t r, const BitVector& v) {
    if (v.size() != cols_) throw std::invalid_argument("set_row: length mismatch");
    auto dst = row(r);
    std::copy(v.words().begin(), v.words().end(), dst.begin());
}

std::size_t BitMatrix::row_weight(std::size_t r) const {
    std::size_t w = 0;
    for (Word x : row(r)) w += std::popcount(x);
    return w;
}

std::size_t BitMatrix::col_weight(std::size_t c) const {
    std::size_t w = 0;
    for (std::size_t r = 0; r < rows_; ++r) w += get(r, c);
    return w;
}

std::size_t BitMatrix::nnz() const {
    std::size_t w = 0;
    for (Word x : data_) w += std::popcount(x);
    return w;
}

bool BitMatrix::is_zero() const {
    for (Word x : data_) if (x) return false;
    return true;
}

BitVector mul(const BitMatrix& A, const BitVector& x) {
    if (A.cols() != x.size())
        throw std::invalid_argument("mul: A.cols != x.len");
    BitVector s(A.rows());
    auto xw = x.words();
    for (std::size_t r = 0; r < A.rows(); ++r) {
        auto rw = A.row(r);
        Word acc = 0;
        for (std::size_t i = 0; i < rw.size(); ++i) acc ^= rw[i] & xw[i];
        if (std::popcount(acc) & 1) s.set(r, true);
    }
    return s;
}

BitMatrix mul(const BitMatrix& A, const BitMatrix& B) {
    if (A.cols() != B.rows())
        throw std::invalid_argument("mul: inner dimension mismatch");
    BitMatrix C(A.rows(), B.cols());
    for (std::size_t r = 0; r < A.rows(); ++r) {
        auto dst = C.row(r);
        for (std::size_t k = 0; k < A.cols(); ++k) {
            if (!A.get(r, k)) continue;
            auto src = B.row(k);
            for (std::size_t w = 0; w < dst.size(); ++w) dst[w] ^= src[w];
        }
    }
    return C;
}

BitMatrix mul_abt(const BitMatrix& A, const BitMatrix& B) {
    if (A.cols() != B.cols())
        throw std::invalid_argument("mul_abt: column mismatch");
    BitMatrix C(A.rows(), B.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        auto ra = A.row(i);
        for (std::size_t j = 0; j < B.rows(); ++j) {
            auto rb = B.row(j);
            Word acc = 0;
            for (std::size_t w = 0; w < ra.size(); ++w) acc ^= ra[w] & rb[w];
            if (std::popcount(acc) & 1) C.set(i, j, true);
        }
    }
    return C;
}

BitMatrix transpose(const BitMatrix& A) {
    BitMatrix T(A.cols(), A.rows());
    for (std::size_t r = 0; r < A.rows(); ++r)
        for (std::size_t c = 0; c < A.cols(); ++c)
            if (A.get(r, c)) T.set(c, r, true);
    return T;
}

BitMatrix kron(const BitMatrix& A, const BitMatrix& B) {
    BitMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (std::size_t ar = 0; ar < A.rows(); ++ar)
        for (std::size_t ac = 0; ac < A.cols(); ++ac) {
            if (!A.get(ar, ac)) continue;
            for (std::size_t br = 0; br < B.rows(); ++br)
                for (std::size_t bc = 0; bc < B.cols(); ++bc)
                    if (B.get(br, bc))
                        K.set(ar * B.rows() + br, ac * B.cols() + bc, true);
        }
    return K;
}

BitMatrix hstack(const BitMatrix& A, const BitMatrix& B) {
    if (A.rows() != B.rows()) throw std::invalid_argument("hstack: row mismatch");
    BitMatrix C(A.rows(), A.cols() + B.cols());
    for (std::size_t r = 0; r < A.rows(); ++r) {
        for (std::size_t c = 0; c < A.cols(); ++c)
            if (A.get(r, c)) C.set(r, c, true);
        for (std::size_t c = 0; c < B.cols(); ++c)
            if (B.get(r, c)) C.set(r, A.cols() + c, true);
    }
    return C;
}

BitMatrix vstack(const BitMatrix& A, const BitMatrix& B) {
    if (A.cols() != B.cols()) throw std::invalid_argument("vstack: column mismatch");
    BitMatrix C(A.rows() + B.rows(), A.cols());
    for (std::size_t r = 0; r < A.rows(); ++r)
        C.set_row(r, A.row_vector(r));
    for (std::size_t r = 0; r < B.rows(); ++r)
        C.set_row(A.rows() + r, B.row_vector(r));
    return C;
}

RowReduceResult row_reduce(const BitMatrix& A) {
    RowReduceResult rr;
    rr.reduced = A;
    BitMatrix& M = rr.reduced;
    std::size_t r = 0;
    for (std::size_t c = 0; c < A.cols() && r < A.rows(); ++c) {
        std::size_t piv = r;
        while (piv < A.rows() && !M.get(piv, c)) ++piv;
        if (piv == A.rows()) continue;
        M.swap_rows(piv, r);
        for (std::size_t r2 = 0; r2 < A.rows(); ++r2)
            if (r2 != r && M.get(r2, c)) M.xor_row_into(r, r2);
        rr.pivot_cols.push_back(c);
        ++r;
    }
    rr.rank = r;
    return rr;
}

std::size_t rank(const BitMatrix& A) { return row_reduce(A).rank; }

bool in_rowspace(const RowReduceResult& rr, const BitVector& v) {
    if (v.size() != rr.reduced.cols())
        throw std::invalid_argument("in_rowspace: length mismatch");
    BitVector t = v;
    for (std::size_t i = 0; i < rr.rank; ++i) {
        if (t.get(rr.pivot_cols[i])) t ^= rr.reduced.row_vector(i);
    }
    return t.is_zero();
}

bool in_rowspace(const BitMatrix& A, const BitVector& v) {
    return in_rowspace(row_reduce(A), v);
}

std::optional<BitVector> solve(const BitMatrix& A, const BitVector& b) {
    if (A.rows() != b.size())
        throw std::invalid_argument("solve: A.rows != b.len");
    // eliminate the augmented system [A | b]
    BitMatrix M = A;
    BitVector rhs = b;
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < A.cols() && r < A.rows(); ++c) {
        std::size_t piv = r;
        while (piv < A.rows() && !M.get(piv, c)) ++piv;
        if (piv == A.rows()) continue;
        M.swap_rows(piv, r);
        bool bp = rhs.get(piv);
        rhs.set(piv, rhs.get(r));
        rhs.set(r, bp);
        for (std::size_t r2 = 0; r2 < A.rows(); ++r2) {
            if (r2 != r && M.get(r2, c)) {
                M.xor_row_into(r, r2);
                if (rhs.get(r)) rhs.flip(r2);
            }
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t r2 = r; r2 < A.rows(); ++r2)
        if (rhs.get(r2)) return std::nullopt;  // 0 = 1 row
    BitVector x(A.cols());
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
        if (rhs.get(i)) x.set(pivot_col[i], true);
    return x;
}

BitMatrix nullspace(const BitMatrix& A) {
    RowReduceResult rr = row_reduce(A);
    std::vector<bool> is_pivot(A.cols(), false);
    for (std::size_t c : rr.pivot_cols) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < A.cols(); ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    BitMatrix N(free_cols.size(), A.cols());
    for (std::size_t i = 0; i < free_cols.size(); ++i) {
        std::size_t f = free_cols[i];
        N.set(i, f, true);
        for (std::size_t p = 0; p < rr.rank; ++p)
            if (rr.reduced.get(p, f)) N.set(i, rr.pivot_cols[p], true);
    }
    return N;
}

BitMatrix invert(const BitMatrix& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("invert: not square");
    BitMatrix aug = hstack(A, BitMatrix::identity(A.rows()));
    RowReduceResult rr = row_reduce(aug);
    if (rr.rank != A.rows() || rr.pivot_cols.back() >= A.rows())
        throw std::invalid_argument("invert: singular matrix");
    for (std::size_t i = 0; i < A.rows(); ++i)
        if (rr.pivot_cols[i] != i) throw std::invalid_argument("invert: singular matrix");
    BitMatrix inv(A.rows(), A.rows());
    for (std::size_t r = 0; r < A.rows(); ++r)
        for (std::size_t c = 0; c < A.rows(); ++c)
            if (rr.reduced.get(r, A.rows() + c)) inv.set(r, c, true);
    return inv;
}

}  // namespace qdec
