#ifndef IDRKIT_MM_HPP
#define IDRKIT_MM_HPP

#include <string>

#include "idrkit/dense.hpp"
#include "idrkit/sparse.hpp"

namespace idrkit {

/// Matrix Market content: coordinate files land in `csr` (symmetric input is
/// expanded to full storage), array files in `array`.
struct MmData {
    bool is_dense = false;
    CsrMatrix csr;
    DenseMat array;
};

/// Throws std::runtime_error with the offending line number on malformed
/// input. Supported: coordinate real general/symmetric, array real general.
MmData mm_read(const std::string& path);

CsrMatrix mm_read_sparse(const std::string& path);
Vector mm_read_vector(const std::string& path);

void mm_write(const std::string& path, const CsrMatrix& a);
void mm_write_array(const std::string& path, const DenseMat& a);
void mm_write_vector(const std::string& path, const Vector& v);

/// One 1-based index per line; returned 0-based.
std::vector<int> read_permutation(const std::string& path, int n);

} // namespace idrkit

#endif
