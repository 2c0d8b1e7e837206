#pragma once

#include <string>
#include <vector>

#include "npd/model.hpp"

/// "NPD1" snapshot files. All integers and reals are little-endian
/// regardless of host:
///
///   offset  size        content
///   0       4           magic "NPD1" (ASCII)
///   4       4           uint32 endianness marker 0x01020304 (bytes 04 03 02 01)
///   8       4           uint32 dim (2 or 3)
///   12      4*dim       uint32 n per axis
///   ...     8*dim       float64 length per axis
///   ...     8           float64 time
///   ...     4           uint32 field count (2)
///   ...     per field   uint32 name length, then the UTF-8 name ("c1", "c2")
///   ...     2*N*8       c1 then c2, float64, row-major with axis 0 slowest
///
/// The file size must match the header exactly.
namespace npd {

struct Snapshot {
    GridPtr grid;
    double time = 0.0;
    std::vector<std::string> field_names{"c1", "c2"};
    RealField c1;
    RealField c2;

    /// rho = c1 - c2, sigma = c1 + c2; no admissibility checks.
    IonState to_state() const;
    static Snapshot of(const IonState& state);
};

void write_snapshot(const Snapshot& snapshot, const std::string& path);
void write_snapshot(const IonState& state, const std::string& path);

/// Throws FormatError on a bad magic, marker, shape or length.
Snapshot read_snapshot(const std::string& path);
/// Also rejects snapshots whose grid differs from `expected`, reporting both shapes.
Snapshot read_snapshot(const std::string& path, const Grid& expected);

}  // namespace npd
