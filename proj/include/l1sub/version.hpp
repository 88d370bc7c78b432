#ifndef L1SUB_VERSION_HPP
#define L1SUB_VERSION_HPP

namespace l1sub {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // L1SUB_VERSION_HPP
