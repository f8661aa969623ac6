#include "qdec/codes.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qdec {

ClassicalCode::ClassicalCode(BitMatrix h, std::string nm,
                             std::optional<std::size_t> d)
    : H(std::move(h)), name(std::move(nm)), distance(d) {
    if (H.is_zero()) throw std::invalid_argument("ClassicalCode: H is zero");
    for (std::size_t c = 0; c < H.cols(); ++c)
        if (H.col_weight(c) == 0)
            throw std::invalid_argument("ClassicalCode: column " + std::to_string(c) +
                                        " participates in no check");
}

BitMatrix CssCode::stabilizer_matrix() const {
    BitMatrix s(m(), 2 * n);
    for (std::size_t r = 0; r < mz(); ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (hz.get(r, c)) s.set(r, c, true);
    for (std::size_t r = 0; r < mx(); ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (hx.get(r, c)) s.set(mz() + r, n + c, true);
    return s;
}

CssCode hgp_construct(const ClassicalCode& c1, const ClassicalCode& c2) {
    const BitMatrix& h1 = c1.H;
    const BitMatrix& h2 = c2.H;
    std::size_t n1 = h1.cols(), m1 = h1.rows();
    std::size_t n2 = h2.cols(), m2 = h2.rows();

    BitMatrix hx = hstack(kron(h1, BitMatrix::identity(n2)),
                          kron(BitMatrix::identity(m1), transpose(h2)));
    BitMatrix hz = hstack(kron(BitMatrix::identity(n1), h2),
                          kron(transpose(h1), BitMatrix::identity(m2)));

    CssCode code;
    code.hx = std::move(hx);
    code.hz = std::move(hz);
    code.n = n1 * n2 + m1 * m2;
    std::size_t rx = rank(code.hx), rz = rank(code.hz);
    code.k = code.n - rx - rz;
    code.name = "hgp(" + c1.name + "," + c2.name + ")";
    std::tie(code.lx, code.lz) = logical_operators(code.hx, code.hz, code.k);
    return code;
}

std::pair<BitMatrix, BitMatrix> logical_operators(const BitMatrix& hx,
                                                  const BitMatrix& hz,
                                                  std::size_t expected_k) {
    const std::size_t n = hx.cols();
    if (hz.cols() != n) throw std::invalid_argument("logical_operators: width mismatch");

    // representatives of ker(Hother) modulo rowspace(Hown)
    auto quotient_basis = [n](const BitMatrix& ker_of, const BitMatrix& mod_rows,
                              std::size_t want) {
        BitMatrix kernel = nullspace(ker_of);
        RowReduceResult mod_rr = row_reduce(mod_rows);
        // accumulate an RREF of chosen representatives to test independence
        BitMatrix acc(want, n);
        std::vector<std::size_t> acc_pivots;
        BitMatrix out(want, n);
        std::size_t found = 0;
        for (std::size_t i = 0; i < kernel.rows() && found < want; ++i) {
            BitVector v = kernel.row_vector(i);
            // reduce by the stabilizer rowspace, then by already-kept rows
            for (std::size_t p = 0; p < mod_rr.rank; ++p)
                if (v.get(mod_rr.pivot_cols[p])) v ^= mod_rr.reduced.row_vector(p);
            for (std::size_t p = 0; p < acc_pivots.size(); ++p)
                if (v.get(acc_pivots[p])) v ^= acc.row_vector(p);
            if (v.is_zero()) continue;
            std::size_t pivot = 0;
            while (!v.get(pivot)) ++pivot;
            // keep acc reduced above the new pivot
            for (std::size_t p = 0; p < acc_pivots.size(); ++p)
                if (acc.get(p, pivot)) {
                    BitVector r = acc.row_vector(p);
                    r ^= v;
                    acc.set_row(p, r);
                }
            acc.set_row(found, v);
            acc_pivots.push_back(pivot);
            out.set_row(found, v);
            ++found;
        }
        if (found != want)
            throw std::runtime_error("logical_operators: kernel/rowspace mismatch");
        return out;
    };

    BitMatrix lx = quotient_basis(hz, hx, expected_k);  // ker H_Z mod rows(H_X)
    BitMatrix lz = quotient_basis(hx, hz, expected_k);
    if (expected_k == 0) return {lx, lz};

    // normalize so that L_X L_Z^T = I (paired symplectic basis)
    BitMatrix pairing = mul_abt(lx, lz);
    BitMatrix a = transpose(invert(pairing));
    lz = mul(a, lz);
    return {lx, lz};
}

ValidationReport validate_css(const CssCode& code) {
    ValidationReport rep;
    rep.n = code.n;
    rep.mx = code.mx();
    rep.mz = code.mz();
    rep.commutation_ok = mul_abt(code.hx, code.hz).is_zero();
    rep.rank_hx = rank(code.hx);
    rep.rank_hz = rank(code.hz);
    rep.k = code.n - rep.rank_hx - rep.rank_hz;

    for (std::size_t r = 0; r < code.mx(); ++r)
        rep.row_weights_hx.push_back(code.hx.row_weight(r));
    for (std::size_t r = 0; r < code.mz(); ++r)
        rep.row_weights_hz.push_back(code.hz.row_weight(r));
    for (std::size_t c = 0; c < code.n; ++c) {
        rep.col_weights_hx.push_back(code.hx.col_weight(c));
        rep.col_weights_hz.push_back(code.hz.col_weight(c));
    }
    auto maxv = [](const std::vector<std::size_t>& v) {
        return v.empty() ? std::size_t{0} : *std::max_element(v.begin(), v.end());
    };
    rep.max_row_weight = std::max(maxv(rep.row_weights_hx), maxv(rep.row_weights_hz));
    rep.max_col_weight = std::max(maxv(rep.col_weights_hx), maxv(rep.col_weights_hz));

    rep.logicals_ok = true;
    if (code.lx.rows() != rep.k || code.lz.rows() != rep.k) {
        rep.logicals_ok = false;
    } else if (rep.k > 0) {
        RowReduceResult rrx = row_reduce(code.hx);
        RowReduceResult rrz = row_reduce(code.hz);
        for (std::size_t i = 0; i < rep.k && rep.logicals_ok; ++i) {
            BitVector vx = code.lx.row_vector(i);
            BitVector vz = code.lz.row_vector(i);
            if (!mul(code.hz, vx).is_zero() || in_rowspace(rrx, vx)) rep.logicals_ok = false;
            if (!mul(code.hx, vz).is_zero() || in_rowspace(rrz, vz)) rep.logicals_ok = false;
        }
        if (rep.logicals_ok &&
            mul_abt(code.lx, code.lz) != BitMatrix::identity(rep.k))
            rep.logicals_ok = false;
    }
    return rep;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << "[[" << n << ", " << k << "]]  m_x=" << mx << " m_z=" << mz
       << " rank(H_X)=" << rank_hx << " rank(H_Z)=" << rank_hz << "\n";
    os << "commutation H_X*H_Z^T = 0: " << (commutation_ok ? "ok" : "VIOLATED") << "\n";
    os << "logical basis: " << (logicals_ok ? "ok" : "VIOLATED") << "\n";
    os << "max row weight " << max_row_weight << ", max col weight " << max_col_weight;
    return os.str();
}

// ---------------------------------------------------------------------------
// alist I/O

namespace {

struct AlistTokens {
    std::vector<long> vals;
    std::vector<std::size_t> lines;  // line number per token
    std::size_t pos = 0;
    std::string origin;

    long next(const char* what) {
        if (pos >= vals.size())
            throw std::runtime_error(origin + ": unexpected end of file while reading " +
                                     std::string(what));
        return vals[pos++];
    }
    std::size_t line() const {
        return pos < lines.size() ? lines[pos] : (lines.empty() ? 1 : lines.back());
    }
};

AlistTokens tokenize_alist(const std::string& text, const std::string& origin) {
    AlistTokens t;
    t.origin = origin;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        long v;
        while (ls >> v) {
            t.vals.push_back(v);
            t.lines.push_back(lineno);
        }
        if (ls.fail() && !ls.eof()) {
            std::string junk;
            ls.clear();
            ls >> junk;
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": non-numeric token '" + junk + "'");
        }
    }
    return t;
}

}  // namespace

BitMatrix parse_alist(const std::string& text, const std::string& origin) {
    AlistTokens t = tokenize_alist(text, origin);
    auto fail = [&](const std::string& msg) -> std::runtime_error {
        return std::runtime_error(origin + ":" + std::to_string(t.line()) + ": " + msg);
    };

    long n = t.next("n"), m = t.next("m");
    if (n <= 0 || m <= 0) throw fail("header n m must be positive");
    long max_col = t.next("max column degree"), max_row = t.next("max row degree");
    if (max_col < 0 || max_row < 0) throw fail("negative max degree");

    std::vector<long> col_deg(n), row_deg(m);
    for (long i = 0; i < n; ++i) {
        col_deg[i] = t.next("column degree");
        if (col_deg[i] < 0 || col_deg[i] > max_col) throw fail("column degree out of range");
    }
    for (long i = 0; i < m; ++i) {
        row_deg[i] = t.next("row degree");
        if (row_deg[i] < 0 || row_deg[i] > max_row) throw fail("row degree out of range");
    }

    BitMatrix H(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    // column adjacency (1-based row indices, zero padded to max_col)
    for (long c = 0; c < n; ++c) {
        long seen = 0;
        for (long j = 0; j < max_col; ++j) {
            long r = t.next("column entry");
            if (r == 0) continue;
            if (r < 1 || r > m) throw fail("row index " + std::to_string(r) + " out of range");
            H.set(static_cast<std::size_t>(r - 1), static_cast<std::size_t>(c), true);
            ++seen;
        }
        if (seen != col_deg[c])
            throw fail("column " + std::to_string(c + 1) + " lists " + std::to_string(seen) +
                       " entries, degree says " + std::to_string(col_deg[c]));
    }
    // row adjacency; must agree with the column lists
    for (long r = 0; r < m; ++r) {
        long seen = 0;
        for (long j = 0; j < max_row; ++j) {
            long c = t.next("row entry");
            if (c == 0) continue;
            if (c < 1 || c > n) throw fail("column index " + std::to_string(c) + " out of range");
            if (!H.get(static_cast<std::size_t>(r), static_cast<std::size_t>(c - 1)))
                throw fail("row list disagrees with column list at (" + std::to_string(r + 1) +
                           "," + std::to_string(c) + ")");
            ++seen;
        }
        if (seen != row_deg[r])
            throw fail("row " + std::to_string(r + 1) + " lists " + std::to_string(seen) +
                       " entries, degree says " + std::to_string(row_deg[r]));
    }
    return H;
}

ClassicalCode load_alist(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open alist file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    BitMatrix H = parse_alist(ss.str(), path);
    std::string stem = std::filesystem::path(path).stem().string();
    return ClassicalCode(std::move(H), stem);
}

void save_alist(const std::string& path, const ClassicalCode& code) {
    const BitMatrix& H = code.H;
    std::size_t n = H.cols(), m = H.rows();
    std::vector<std::vector<std::size_t>> by_col(n), by_row(m);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (H.get(r, c)) {
                by_col[c].push_back(r + 1);
                by_row[r].push_back(c + 1);
            }
    std::size_t max_col = 0, max_row = 0;
    for (auto& v : by_col) max_col = std::max(max_col, v.size());
    for (auto& v : by_row) max_row = std::max(max_row, v.size());

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write alist file: " + path);
    f << n << " " << m << "\n" << max_col << " " << max_row << "\n";
    for (std::size_t c = 0; c < n; ++c) f << by_col[c].size() << (c + 1 < n ? " " : "\n");
    for (std::size_t r = 0; r < m; ++r) f << by_row[r].size() << (r + 1 < m ? " " : "\n");
    auto dump = [&](const std::vector<std::vector<std::size_t>>& adj, std::size_t width) {
        for (auto& v : adj) {
            for (std::size_t j = 0; j < width; ++j) {
                f << (j < v.size() ? v[j] : 0);
                f << (j + 1 < width ? " " : "\n");
            }
        }
    };
    dump(by_col, max_col);
    dump(by_row, max_row);
    if (!f) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// CssCode directory

void save_css_dir(const std::string& dir, const CssCode& code) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_alist((fs::path(dir) / "hx.alist").string(), ClassicalCode(code.hx, "hx"));
    save_alist((fs::path(dir) / "hz.alist").string(), ClassicalCode(code.hz, "hz"));
    std::ofstream meta((fs::path(dir) / "meta.txt").string(), std::ios::binary);
    if (!meta) throw std::runtime_error("cannot write meta.txt in " + dir);
    meta << "n " << code.n << "\nk " << code.k << "\nmx " << code.mx()
         << "\nmz " << code.mz() << "\nname " << code.name << "\n";
}

CssCode load_css_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    CssCode code;
    code.hx = load_alist((fs::path(dir) / "hx.alist").string()).H;
    code.hz = load_alist((fs::path(dir) / "hz.alist").string()).H;
    if (code.hx.cols() != code.hz.cols())
        throw std::runtime_error(dir + ": hx/hz width mismatch");
    code.n = code.hx.cols();

    std::ifstream meta((fs::path(dir) / "meta.txt").string());
    if (!meta) throw std::runtime_error("cannot open meta.txt in " + dir);
    std::size_t meta_n = 0, meta_k = 0, meta_mx = 0, meta_mz = 0;
    std::string key;
    while (meta >> key) {
        if (key == "n") meta >> meta_n;
        else if (key == "k") meta >> meta_k;
        else if (key == "mx") meta >> meta_mx;
        else if (key == "mz") meta >> meta_mz;
        else if (key == "name") meta >> code.name;
        else { std::string skip; meta >> skip; }
    }
    if (meta_n != code.n || meta_mx != code.mx() || meta_mz != code.mz())
        throw std::runtime_error(dir + ": meta.txt disagrees with alist dimensions");
    code.k = code.n - rank(code.hx) - rank(code.hz);
    if (meta_k != code.k)
        throw std::runtime_error(dir + ": meta.txt k disagrees with rank computation");
    if (!mul_abt(code.hx, code.hz).is_zero())
        throw std::runtime_error(dir + ": H_X H_Z^T != 0");
    std::tie(code.lx, code.lz) = logical_operators(code.hx, code.hz, code.k);
    return code;
}

}  // namespace qdec
