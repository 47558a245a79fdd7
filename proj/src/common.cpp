#include "pkgm/common.hpp"

#include <iomanip>
#include <sstream>

namespace pkgm {

std::string hex_u64(uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setfill('0') << std::setw(16) << v;
  return os.str();
}

}  // namespace pkgm
