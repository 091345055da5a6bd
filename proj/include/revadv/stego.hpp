#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "revadv/image.hpp"
#include "revadv/quantize.hpp"

namespace revadv {

enum class StegoMode : std::uint8_t { Lsb = 0, Hs = 1 };

/// Payload container layout (all integers big-endian):
///   magic "DPTR" | version u8 | mode u8 | xi u8 | H u16 | W u16 |
///   code lengths (5 x 2 bits, padded to 2 bytes) | bit count u32 |
///   Huffman bitstream (MSB-first, zero-padded to a byte) | CRC-32 u32
/// The CRC is computed over the plaintext bytes before it; everything after
/// magic+version (CRC included) is XORed with the keystream, so a wrong key
/// surfaces as an integrity error, never as silently wrong stages.
inline constexpr std::size_t kPayloadHeaderBytes = 17;
inline constexpr char kPayloadMagic[4] = {'D', 'P', 'T', 'R'};
inline constexpr std::uint8_t kPayloadVersion = 1;

/// XOR with the keyed xoshiro256** stream (seed = splitmix of FNV-1a of the
/// key). Involutive. `skip` shifts the keystream origin so that partial
/// buffers can be decrypted in place. Empty keys are rejected.
void keystream_xor(std::vector<std::uint8_t>& bytes, const std::string& key, std::size_t skip = 0);

std::vector<std::uint8_t> build_payload(const StageMatrix& stages, const std::string& key,
                                        StegoMode mode);
StageMatrix parse_payload(const std::vector<std::uint8_t>& bytes, const std::string& key,
                          StegoMode* mode_out = nullptr);

/// Byte sequence -> bit sequence in embedding order (bit 0 of each byte first).
std::vector<bool> bits_from_bytes(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> bytes_from_bits(const std::vector<bool>& bits);

/// Replace LSBs in scan order (row, col, channel) starting at `offset`.
ImageU8 lsb_embed(const ImageU8& carrier, const std::vector<bool>& bits, std::size_t offset = 0);
std::vector<bool> lsb_extract(const ImageU8& stego, std::size_t nbits, std::size_t offset = 0);

/// Reversible multi-pass histogram shifting. Each pass picks the current
/// (peak, empty) bin pair of one channel, shifts the open interval between
/// them by one toward the empty bin and encodes bits at the peak. Pass
/// metadata lives in the LSBs of a reserved prefix region whose original
/// bits travel inside the payload, so extraction returns the carrier
/// bit-exactly.
ImageU8 hs_embed(const ImageU8& carrier, const std::vector<bool>& bits);
struct HsExtracted {
    std::vector<bool> bits;
    ImageU8 carrier;
};
HsExtracted hs_extract(const ImageU8& stego);

/// Builds the complete reversible adversarial example: Huffman-code the
/// stages, encrypt, embed into the adversarial image.
ImageU8 embed_perturbation(const ImageU8& adv, const StageMatrix& stages, const std::string& key,
                           StegoMode mode);

struct Recovered {
    ImageU8 restored;   // original estimate (exact in hs mode)
    ImageU8 adv;        // adversarial carrier as recovered
    StageMatrix stages;
    StegoMode mode;
};

/// Extracts and decrypts the payload, rebuilds the perturbation and removes
/// it. The mode is sniffed from the container; passing `expect_mode` makes a
/// mismatch an error.
Recovered recover_image(const ImageU8& stego, const std::string& key,
                        std::optional<StegoMode> expect_mode = std::nullopt);

}  // namespace revadv
