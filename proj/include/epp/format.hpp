#ifndef EPP_FORMAT_HPP
#define EPP_FORMAT_HPP

#include <string>

namespace epp {

// Shortest decimal string that round-trips to the same double (std::to_chars),
// so emitted files are byte-stable across runs and platforms.
std::string format_double(double value);

} // namespace epp

#endif
