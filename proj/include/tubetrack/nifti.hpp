#pragma once

#include <string>

#include "tubetrack/volume.hpp"

namespace tubetrack {

// Minimal single-file NIfTI-1 support. Readable datatypes: uint8, int16,
// int32, float32, float64; scl_slope/scl_inter are applied when slope is
// nonzero. Byte-swapped (big-endian) files are handled. Files ending in .gz
// are read and written through zlib; plain files go through the same code
// path in transparent mode.

Volume load_nifti(const std::string& path);

void save_nifti_float(const Volume& v, const std::string& path);
void save_nifti_uint8(const VoxelMask& m, const std::string& path);
void save_nifti_int32(const LabelVolume& l, const std::string& path);

}  // namespace tubetrack
