#include "wavecast/error.hpp"

namespace wavecast {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Format: return "format";
    case ErrorKind::Data: return "data";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::Io: return "io";
    case ErrorKind::State: return "state";
    case ErrorKind::Numeric: return "numeric";
    }
    return "unknown";
}

}  // namespace wavecast
