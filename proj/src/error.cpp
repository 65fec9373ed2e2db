// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/error.hpp"

namespace accrual {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::domain: return "domain";
        case ErrorKind::model: return "model";
        case ErrorKind::numerical: return "numerical";
        case ErrorKind::data: return "data";
        case ErrorKind::parse: return "parse";
        case ErrorKind::request: return "request";
    }
    return "unknown";
}

}  // namespace accrual
