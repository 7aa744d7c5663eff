#pragma once

#include <memory>
#include <string>

#include "gcsl/policy.hpp"

namespace gcsl {

// Binary policy snapshot: magic "GCSL1", one kind byte ('M' = MLP, 'T' =
// tabular), an int32 dimension header, then little-endian 64-bit floats in
// row-major order (flat parameter vector / count table).
void save_checkpoint(const Policy& policy, const std::string& path);
std::unique_ptr<Policy> load_checkpoint(const std::string& path);

}  // namespace gcsl
