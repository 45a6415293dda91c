#ifndef SPDELAB_VERSION_HPP
#define SPDELAB_VERSION_HPP

namespace spdelab {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // SPDELAB_VERSION_HPP
