#pragma once

#include <string>

#include <json.hpp>

#include "comemnet/branches.hpp"
#include "comemnet/memory_buffer.hpp"

namespace comemnet {

// Versioned JSON snapshot of both branches and the memory buffer. The node
// embedding table is keyed by sensor id; everything else is dumped as plain
// row-major arrays. Doubles survive the round trip bit-exactly (shortest
// round-trip formatting on write, exact binary64 parse on read).
struct Checkpoint {
    DualBranchModel model;
    TemporalMemoryBuffer buffer;
};

nlohmann::json checkpoint_to_json(DualBranchModel& model, const TemporalMemoryBuffer& buffer);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, DualBranchModel& model,
                     const TemporalMemoryBuffer& buffer);
Checkpoint load_checkpoint(const std::string& path);

} // namespace comemnet
