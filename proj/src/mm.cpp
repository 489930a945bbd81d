#include "idrkit/mm.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace idrkit {

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

MmData mm_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    int lineno = 0;

    if (!std::getline(in, line)) fail(path, 1, "empty file");
    ++lineno;
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        fail(path, lineno, "not a MatrixMarket matrix header");
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (format != "coordinate" && format != "array")
        fail(path, lineno, "unsupported format '" + format + "'");
    if (field != "real" && field != "integer")
        fail(path, lineno, "unsupported field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        fail(path, lineno, "unsupported symmetry '" + symmetry + "'");

    // skip comments / blank lines
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (line[pos] == '%') continue;
        break;
    }

    MmData out;
    std::istringstream sz(line);
    if (format == "coordinate") {
        long nr = 0, nc = 0, nnz = 0;
        if (!(sz >> nr >> nc >> nnz) || nr <= 0 || nc <= 0 || nnz < 0)
            fail(path, lineno, "bad size line");
        std::vector<std::array<double, 3>> ijv;
        ijv.reserve(static_cast<std::size_t>(nnz) * (symmetry == "symmetric" ? 2 : 1));
        for (long k = 0; k < nnz; ++k) {
            if (!std::getline(in, line)) fail(path, lineno + 1, "unexpected end of file");
            ++lineno;
            std::istringstream es(line);
            long i = 0, j = 0;
            double v = 0.0;
            if (!(es >> i >> j >> v)) fail(path, lineno, "bad entry");
            if (i < 1 || i > nr || j < 1 || j > nc) fail(path, lineno, "index out of range");
            ijv.push_back({static_cast<double>(i - 1), static_cast<double>(j - 1), v});
            if (symmetry == "symmetric" && i != j)
                ijv.push_back({static_cast<double>(j - 1), static_cast<double>(i - 1), v});
        }
        out.csr = CsrMatrix::from_triplets(static_cast<int>(nr), static_cast<int>(nc),
                                           std::move(ijv));
    } else {
        long nr = 0, nc = 0;
        if (!(sz >> nr >> nc) || nr <= 0 || nc <= 0) fail(path, lineno, "bad size line");
        out.is_dense = true;
        out.array = DenseMat(static_cast<int>(nr), static_cast<int>(nc));
        long total = symmetry == "symmetric" ? nr * (nr + 1) / 2 : nr * nc;
        long col = 0, row = 0;
        for (long k = 0; k < total; ++k) {
            double v = 0.0;
            if (!(in >> v)) fail(path, lineno, "missing array value");
            out.array(static_cast<int>(row), static_cast<int>(col)) = v;
            if (symmetry == "symmetric")
                out.array(static_cast<int>(col), static_cast<int>(row)) = v;
            ++row;
            if (row == nr) {
                ++col;
                row = symmetry == "symmetric" ? col : 0;
            }
        }
    }
    return out;
}

CsrMatrix mm_read_sparse(const std::string& path) {
    MmData d = mm_read(path);
    if (d.is_dense) {
        // accept dense files as sparse input
        std::vector<std::array<double, 3>> ijv;
        for (int i = 0; i < d.array.rows(); ++i)
            for (int j = 0; j < d.array.cols(); ++j)
                if (d.array(i, j) != 0.0)
                    ijv.push_back({static_cast<double>(i), static_cast<double>(j), d.array(i, j)});
        return CsrMatrix::from_triplets(d.array.rows(), d.array.cols(), std::move(ijv));
    }
    return std::move(d.csr);
}

Vector mm_read_vector(const std::string& path) {
    MmData d = mm_read(path);
    if (d.is_dense) {
        if (d.array.cols() != 1) throw std::runtime_error(path + ": expected a single column");
        return d.array.col(0);
    }
    if (d.csr.n_cols != 1) throw std::runtime_error(path + ": expected a single column");
    Vector v(static_cast<std::size_t>(d.csr.n_rows), 0.0);
    for (int i = 0; i < d.csr.n_rows; ++i)
        for (int k = d.csr.row_offsets[i]; k < d.csr.row_offsets[i + 1]; ++k)
            v[static_cast<std::size_t>(i)] = d.csr.values[k];
    return v;
}

void mm_write(const std::string& path, const CsrMatrix& a) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.n_rows << ' ' << a.n_cols << ' ' << a.nnz() << '\n';
    char buf[40];
    for (int i = 0; i < a.n_rows; ++i)
        for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", a.values[k]);
            out << (i + 1) << ' ' << (a.col_indices[k] + 1) << ' ' << buf << '\n';
        }
}

void mm_write_array(const std::string& path, const DenseMat& a) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "%%MatrixMarket matrix array real general\n";
    out << a.rows() << ' ' << a.cols() << '\n';
    char buf[40];
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
            out << buf << '\n';
        }
}

void mm_write_vector(const std::string& path, const Vector& v) {
    DenseMat a(static_cast<int>(v.size()), 1);
    a.set_col(0, v);
    mm_write_array(path, a);
}

std::vector<int> read_permutation(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<int> perm;
    perm.reserve(static_cast<std::size_t>(n));
    long v = 0;
    while (in >> v) perm.push_back(static_cast<int>(v - 1));
    if (static_cast<int>(perm.size()) != n)
        throw std::runtime_error(path + ": expected " + std::to_string(n) + " indices");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
            throw std::runtime_error(path + ": not a permutation");
        seen[static_cast<std::size_t>(p)] = 1;
    }
    return perm;
}

} // namespace idrkit
