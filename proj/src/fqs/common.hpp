#ifndef FQS_COMMON_HPP
#define FQS_COMMON_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fqs {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Error taxonomy mirrors the CLI exit codes: 2 validation, 3 numerical, 4 io.
enum class ErrorKind : int { validation = 2, numerical = 3, io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_validation(const std::string& msg) { throw Error(ErrorKind::validation, msg); }
[[noreturn]] inline void fail_numerical(const std::string& msg) { throw Error(ErrorKind::numerical, msg); }
[[noreturn]] inline void fail_io(const std::string& msg) { throw Error(ErrorKind::io, msg); }

inline double sq(double x) { return x * x; }

inline bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// k_+ = max(k, 0) as used in the dyadic weights 2^{2k_+}.
inline int kplus(int k) { return k > 0 ? k : 0; }

inline double pow2d(double e) { return std::exp2(e); }

}  // namespace fqs

#endif
