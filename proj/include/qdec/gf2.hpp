#pragma once

// Bit-packed GF(2) vectors and matrices. Dense row-major storage, one
// uint64 word holds 64 column bits. All mutating ops keep the trailing
// bits of the last word in each row zeroed, so whole-word popcounts and
// comparisons are valid without masking.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qdec {

using Word = std::uint64_t;
inline constexpr int kWordBits = 64;

inline std::size_t words_for_bits(std::size_t nbits) {
    return (nbits + kWordBits - 1) / kWordBits;
}

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), w_(words_for_bits(len), 0) {}

    static BitVector from_bits(const std::vector<int>& bits);

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool get(std::size_t i) const {
        return (w_[i / kWordBits] >> (i % kWordBits)) & 1u;
    }
    void set(std::size_t i, bool v) {
        Word m = Word(1) << (i % kWordBits);
        if (v) w_[i / kWordBits] |= m; else w_[i / kWordBits] &= ~m;
    }
    void flip(std::size_t i) { w_[i / kWordBits] ^= Word(1) << (i % kWordBits); }

    std::size_t weight() const;
    bool is_zero() const;

    BitVector& operator^=(const BitVector& o);
    friend BitVector operator^(BitVector a, const BitVector& b) { a ^= b; return a; }
    bool operator==(const BitVector& o) const = default;

    // copies bits [lo, lo+len) into a fresh vector
    BitVector slice(std::size_t lo, std::size_t len) const;
    // writes src into bits [lo, lo+src.size())
    void assign_slice(std::size_t lo, const BitVector& src);

    std::span<const Word> words() const { return w_; }
    std::span<Word> words() { return w_; }

    std::string to_string() const;  // e.g. "1011"

private:
    std::size_t len_ = 0;
    std::vector<Word> w_;
};

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_(words_for_bits(cols)), data_(rows * wpr_, 0) {}

    static BitMatrix identity(std::size_t n);
    static BitMatrix from_rows(const std::vector<std::vector<int>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return wpr_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * wpr_ + c / kWordBits] >> (c % kWordBits)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v) {
        Word m = Word(1) << (c % kWordBits);
        Word& w = data_[r * wpr_ + c / kWordBits];
        if (v) w |= m; else w &= ~m;
    }

    std::span<const Word> row(std::size_t r) const { return {data_.data() + r * wpr_, wpr_}; }
    std::span<Word> row(std::size_t r) { return {data_.data() + r * wpr_, wpr_}; }

    void xor_row_into(std::size_t src, std::size_t dst);  // dst ^= src
    void swap_rows(std::size_t a, std::size_t b);

    BitVector row_vector(std::size_t r) const;
    void set_row(std::size_t r, const BitVector& v);

    std::size_t row_weight(std::size_t r) const;
    std::size_t col_weight(std::size_t c) const;
    std::size_t nnz() const;
    bool is_zero() const;

    bool operator==(const BitMatrix& o) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<Word> data_;
};

// s[i] = parity(row_i(A) & x); throws on dimension mismatch.
BitVector mul(const BitMatrix& A, const BitVector& x);

// C = A * B over GF(2)
BitMatrix mul(const BitMatrix& A, const BitMatrix& B);

// C = A * B^T; both operands are scanned row-major, no transpose copy.
BitMatrix mul_abt(const BitMatrix& A, const BitMatrix& B);

BitMatrix transpose(const BitMatrix& A);
BitMatrix kron(const BitMatrix& A, const BitMatrix& B);
BitMatrix hstack(const BitMatrix& A, const BitMatrix& B);
BitMatrix vstack(const BitMatrix& A, const BitMatrix& B);

struct RowReduceResult {
    BitMatrix reduced;            // reduced row echelon form
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_cols;  // strictly increasing
};

RowReduceResult row_reduce(const BitMatrix& A);

std::size_t rank(const BitMatrix& A);

// true iff v is a GF(2) combination of rows of A
bool in_rowspace(const BitMatrix& A, const BitVector& v);
// same, reusing a precomputed reduction of A
bool in_rowspace(const RowReduceResult& rr, const BitVector& v);

// Some x with A x = b, free variables fixed to 0; nullopt if inconsistent.
std::optional<BitVector> solve(const BitMatrix& A, const BitVector& b);

// Rows form a basis of {x : A x = 0}.
BitMatrix nullspace(const BitMatrix& A);

// Inverse of a square full-rank matrix; throws if singular.
BitMatrix invert(const BitMatrix& A);

}  // namespace qdec
