#pragma once

// MetaImage (.mhd + .raw, or single-file .mha) subset reader and writer.
//
// Supported header keys: ObjectType = Image, NDims = 3, DimSize, ElementSpacing,
// Offset (origin; Origin/Position accepted as aliases), ElementType in
// {MET_UCHAR, MET_SHORT, MET_USHORT, MET_FLOAT}, ElementByteOrderMSB = False
// (BinaryDataByteOrderMSB alias), ElementDataFile = <file> | LOCAL.
// Raw data is little-endian with x varying fastest.

#include <filesystem>
#include <string>
#include <string_view>

#include "gbmcut/volume.hpp"

namespace gbmcut {

// Loads a detached-header (.mhd) or local-data (.mha) MetaImage file.
// Throws FormatError, UnsupportedElementType, DataLengthMismatch or IoError.
Volume load_volume(const std::filesystem::path& path);

// Parses a header whose data is either LOCAL (bytes following the header in
// `bytes`) or held in `detached_raw`.
Volume parse_metaimage(std::string_view bytes, const std::string* detached_raw = nullptr);

// Writes `volume` in its element kind. A ".mha" extension stores the data
// inline; anything else writes a header plus a sibling ".raw" file.
void save_volume(const Volume& volume, const std::filesystem::path& path);

// Writes the mask as MET_UCHAR with values exactly 0/1.
void save_mask(const Mask& mask, const std::filesystem::path& path);

// Single-file (.mha) encoding of a mask, byte-identical to save_mask(*.mha).
std::string encode_mask_mha(const Mask& mask);
std::string encode_volume_mha(const Volume& volume);

}  // namespace gbmcut
