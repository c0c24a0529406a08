#include "snaploc/io.hpp"

#include <cstdio>

namespace snaploc {

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", value);
    return buf;
}

}  // namespace snaploc
