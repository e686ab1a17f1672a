#include "rfv/core.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace rfv {

int configure_threads() {
    if (const char* env = std::getenv("RFV_THREADS")) {
        int n = -1;
        try {
            std::size_t used = 0;
            n = std::stoi(env, &used);
            if (env[used] != '\0') n = -1;
        } catch (const std::exception&) {
        }
        if (n < 0) throw ConfigError(std::string("RFV_THREADS must be a nonnegative integer, got '") + env + "'");
        if (n >= 1) omp_set_num_threads(n);
    }
    return omp_get_max_threads();
}

}  // namespace rfv
