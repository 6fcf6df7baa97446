#pragma once

namespace scl {
constexpr const char* kVersion = "0.1.0";
}
