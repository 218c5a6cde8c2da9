#pragma once

// SecretFile and TranscriptFile: JSON documents, field names in
// docs/formats.md. Doubles are written with round-trip precision.

#include <filesystem>
#include <string>
#include <string_view>

#include "qsts/protocol.hpp"

namespace qsts {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Norm tolerances applied when loading a secret.
inline constexpr double kSecretNormExact = 1e-6;
inline constexpr double kSecretNormRepairable = 1e-3;

struct LoadedSecret {
  SecretState secret;
  std::string warning;  // non-empty if the amplitudes were renormalized
};

// Accepts |norm - 1| <= kSecretNormExact silently, renormalizes with a warning
// up to kSecretNormRepairable, rejects beyond (InvalidArgument).
LoadedSecret parse_secret(std::string_view text);
std::string format_secret(const SecretState& secret);

std::string format_transcript(const Transcript& t);
Transcript parse_transcript(std::string_view text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace qsts
