#pragma once

// Binary snapshots.
//
//   SSGF: "SSGF", u32 version (=1), u32 n1, u32 n2, u8 kind, then float64 LE.
//         kind 0: n1*n2 physical values, row-major [i1][i2].
//         kind 1: full n1 x n2 FFT-ordered spectrum, interleaved re/im.
//   SSG3: "SSG3", u32 n1, u32 n2, u32 n3, then n3 full spectra as in SSGF
//         kind 1, ascending in j.

#include <filesystem>

#include "ssg/elliptic_strip.hpp"
#include "ssg/fields.hpp"

namespace ssg {

enum class SnapshotKind : unsigned char { Physical = 0, Spectral = 1 };

void write_field(const std::filesystem::path& path, const GridField& f);
void write_field(const std::filesystem::path& path, const SpectralField2D& f);
void write_strip(const std::filesystem::path& path, const StripField3D& u);

/// Reads either kind; physical snapshots are transformed.
SpectralField2D read_spectral_field(const std::filesystem::path& path);
/// Reads either kind; spectral snapshots are transformed.
GridField read_grid_field(const std::filesystem::path& path);
SnapshotKind read_field_kind(const std::filesystem::path& path);
StripField3D read_strip(const std::filesystem::path& path);

}  // namespace ssg
