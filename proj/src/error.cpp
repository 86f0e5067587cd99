#include "dthp/error.hpp"

namespace dthp {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::dimension_mismatch: return "dimension_mismatch";
        case ErrorKind::data: return "data";
        case ErrorKind::config: return "config";
        case ErrorKind::io: return "io";
        case ErrorKind::numerical: return "numerical";
        case ErrorKind::unstable_process: return "unstable_process";
    }
    return "unknown";
}

}  // namespace dthp
