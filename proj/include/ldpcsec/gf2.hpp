#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldpcsec {

/// Packed bit vector over GF(2).
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

    std::size_t size() const { return size_; }

    bool get(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i, bool v) {
        const std::uint64_t mask = std::uint64_t(1) << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

    void xor_with(const BitVector& o) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    }

    bool is_zero() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    bool operator==(const BitVector&) const = default;

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Dense bit-packed GF(2) matrix, row major. All operations are exact; the
/// elimination routines pivot on the first nonzero row so bases come out
/// identical from run to run.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), bits_(rows * wpr_, 0) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return wpr_; }

    bool get(std::size_t r, std::size_t c) const {
        return (bits_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v) {
        const std::uint64_t mask = std::uint64_t(1) << (c & 63);
        if (v)
            bits_[r * wpr_ + (c >> 6)] |= mask;
        else
            bits_[r * wpr_ + (c >> 6)] &= ~mask;
    }

    std::span<const std::uint64_t> row(std::size_t r) const {
        return {bits_.data() + r * wpr_, wpr_};
    }

    void xor_row_into(std::size_t src, std::size_t dst) {
        std::uint64_t* d = bits_.data() + dst * wpr_;
        const std::uint64_t* s = bits_.data() + src * wpr_;
        for (std::size_t w = 0; w < wpr_; ++w) d[w] ^= s[w];
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        std::uint64_t* pa = bits_.data() + a * wpr_;
        std::uint64_t* pb = bits_.data() + b * wpr_;
        for (std::size_t w = 0; w < wpr_; ++w) std::swap(pa[w], pb[w]);
    }

    BitVector row_vector(std::size_t r) const {
        BitVector v(cols_);
        for (std::size_t w = 0; w < wpr_; ++w) v.words()[w] = bits_[r * wpr_ + w];
        return v;
    }
    void assign_row(std::size_t r, const BitVector& v) {
        for (std::size_t w = 0; w < wpr_; ++w) bits_[r * wpr_ + w] = v.words()[w];
    }

    BitMatrix transpose() const {
        BitMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t w = 0; w < wpr_; ++w) {
                std::uint64_t bits = bits_[r * wpr_ + w];
                while (bits) {
                    const int b = __builtin_ctzll(bits);
                    bits &= bits - 1;
                    t.set(w * 64 + static_cast<std::size_t>(b), r, true);
                }
            }
        return t;
    }

    /// M * x over GF(2).
    BitVector multiply(const BitVector& x) const {
        if (x.size() != cols_) throw std::invalid_argument("multiply: size mismatch");
        BitVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            std::uint64_t acc = 0;
            const std::uint64_t* p = bits_.data() + r * wpr_;
            for (std::size_t w = 0; w < wpr_; ++w) acc ^= p[w] & x.words()[w];
            out.set(r, __builtin_parityll(acc));
        }
        return out;
    }

    BitMatrix multiply(const BitMatrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("multiply: shape mismatch");
        BitMatrix out(rows_, o.cols_);
        for (std::size_t r = 0; r < rows_; ++r) {
            std::uint64_t* dst = out.bits_.data() + r * out.wpr_;
            for (std::size_t w = 0; w < wpr_; ++w) {
                std::uint64_t bits = bits_[r * wpr_ + w];
                while (bits) {
                    const int b = __builtin_ctzll(bits);
                    bits &= bits - 1;
                    const std::size_t k = w * 64 + static_cast<std::size_t>(b);
                    const std::uint64_t* src = o.bits_.data() + k * o.wpr_;
                    for (std::size_t ww = 0; ww < o.wpr_; ++ww) dst[ww] ^= src[ww];
                }
            }
        }
        return out;
    }

    std::size_t rank() const {
        BitMatrix work(*this);
        return work.eliminate(nullptr);
    }

    /// Rank of the submatrix formed by the columns where mask is 1. Columns
    /// outside the mask are zeroed in place, which leaves the rank of the
    /// selection unchanged; no gather is needed.
    std::size_t rank_of_masked_columns(const BitVector& mask) const {
        if (mask.size() != cols_) throw std::invalid_argument("mask size mismatch");
        BitMatrix work(*this);
        for (std::size_t r = 0; r < rows_; ++r) {
            std::uint64_t* p = work.bits_.data() + r * wpr_;
            for (std::size_t w = 0; w < wpr_; ++w) p[w] &= mask.words()[w];
        }
        return work.eliminate(nullptr);
    }

    /// Columns listed in `cols` (strictly increasing), in order.
    BitMatrix column_submatrix(std::span<const std::size_t> cols) const {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (cols[i] >= cols_) throw std::out_of_range("column index out of range");
            if (i > 0 && cols[i] <= cols[i - 1])
                throw std::invalid_argument("column indices must be strictly increasing");
        }
        BitMatrix out(rows_, cols.size());
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t i = 0; i < cols.size(); ++i)
                if (get(r, cols[i])) out.set(r, i, true);
        return out;
    }

    /// Full-row-rank matrix with the same row space (rows of the reduced
    /// echelon form).
    BitMatrix row_basis() const {
        BitMatrix work(*this);
        std::vector<std::size_t> pivots;
        const std::size_t r = work.eliminate(&pivots);
        BitMatrix out(r, cols_);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t w = 0; w < wpr_; ++w)
                out.bits_[i * wpr_ + w] = work.bits_[i * wpr_ + w];
        return out;
    }

    /// Rows form a basis of {x : M x = 0}; row count is cols - rank.
    BitMatrix nullspace_basis() const {
        BitMatrix work(*this);
        std::vector<std::size_t> pivots;
        const std::size_t r = work.eliminate(&pivots);
        std::vector<bool> is_pivot(cols_, false);
        for (auto p : pivots) is_pivot[p] = true;
        BitMatrix out(cols_ - r, cols_);
        std::size_t row_out = 0;
        for (std::size_t f = 0; f < cols_; ++f) {
            if (is_pivot[f]) continue;
            out.set(row_out, f, true);
            for (std::size_t i = 0; i < r; ++i)
                if (work.get(i, f)) out.set(row_out, pivots[i], true);
            ++row_out;
        }
        return out;
    }

    /// One solution of M x = s, or nullopt when s is outside the column space.
    std::optional<BitVector> solve(const BitVector& s) const {
        if (s.size() != rows_) throw std::invalid_argument("solve: rhs size mismatch");
        BitMatrix work(rows_, cols_ + 1);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t w = 0; w < wpr_; ++w)
                work.bits_[r * work.wpr_ + w] = bits_[r * wpr_ + w];
            // guard against stray bits past cols_ (none by construction)
            if (s.get(r)) work.set(r, cols_, true);
        }
        std::vector<std::size_t> pivots;
        const std::size_t r = work.eliminate(&pivots);
        for (std::size_t i = 0; i < r; ++i)
            if (pivots[i] == cols_) return std::nullopt;  // pivot in the rhs column
        BitVector x(cols_);
        for (std::size_t i = 0; i < r; ++i)
            if (work.get(i, cols_)) x.set(pivots[i], true);
        return x;
    }

    // --- serialization ---

    /// Debug text format: one row of '0'/'1' per line.
    std::string to_text() const {
        std::string out;
        out.reserve(rows_ * (cols_ + 1));
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) out.push_back(get(r, c) ? '1' : '0');
            out.push_back('\n');
        }
        return out;
    }

    static BitMatrix from_text(const std::string& text) {
        std::vector<std::string> lines;
        std::string cur;
        for (char ch : text) {
            if (ch == '\n') {
                if (!cur.empty()) lines.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur.push_back(ch);
            }
        }
        if (!cur.empty()) lines.push_back(cur);
        const std::size_t rows = lines.size();
        const std::size_t cols = rows ? lines[0].size() : 0;
        BitMatrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            if (lines[r].size() != cols)
                throw std::invalid_argument("ragged rows in matrix text");
            for (std::size_t c = 0; c < cols; ++c) {
                if (lines[r][c] == '1')
                    m.set(r, c, true);
                else if (lines[r][c] != '0')
                    throw std::invalid_argument("matrix text must be 0/1");
            }
        }
        return m;
    }

    /// Packed binary format: 16-byte header {rows, cols} as little-endian
    /// uint64, then each row's words.
    void write_binary(std::ostream& os) const {
        auto put_u64 = [&](std::uint64_t v) {
            unsigned char buf[8];
            for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
            os.write(reinterpret_cast<const char*>(buf), 8);
        };
        put_u64(rows_);
        put_u64(cols_);
        for (auto w : bits_) put_u64(w);
    }

    static BitMatrix read_binary(std::istream& is) {
        auto get_u64 = [&]() -> std::uint64_t {
            unsigned char buf[8];
            is.read(reinterpret_cast<char*>(buf), 8);
            if (!is) throw std::invalid_argument("truncated binary matrix");
            std::uint64_t v = 0;
            for (int i = 0; i < 8; ++i) v |= std::uint64_t(buf[i]) << (8 * i);
            return v;
        };
        const std::uint64_t rows = get_u64();
        const std::uint64_t cols = get_u64();
        BitMatrix m(rows, cols);
        for (auto& w : m.bits_) w = get_u64();
        return m;
    }

    bool operator==(const BitMatrix&) const = default;

private:
    // In-place reduced row echelon form. Returns the rank; if `pivots` is
    // given, fills it with the pivot column of each of the first rank rows.
    std::size_t eliminate(std::vector<std::size_t>* pivots) {
        std::size_t rank = 0;
        for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
            std::size_t pivot = rows_;
            for (std::size_t r = rank; r < rows_; ++r)
                if (get(r, c)) {
                    pivot = r;
                    break;
                }
            if (pivot == rows_) continue;
            swap_rows(pivot, rank);
            for (std::size_t r = 0; r < rows_; ++r)
                if (r != rank && get(r, c)) xor_row_into(rank, r);
            if (pivots) pivots->push_back(c);
            ++rank;
        }
        return rank;
    }

    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<std::uint64_t> bits_;
};

}  // namespace ldpcsec
