#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

namespace test_util {

inline std::string data_root() {
    if (const char* env = std::getenv("BADAM_DATA_ROOT")) return env;
    return "data";
}

inline bool has_mnist() {
    return std::filesystem::exists(data_root() + "/mnist/train-images-idx3-ubyte");
}

inline bool has_fashion() {
    return std::filesystem::exists(data_root() + "/fashion/train-images-idx3-ubyte");
}

}  // namespace test_util
