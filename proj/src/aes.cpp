#include "hpcids/aes.hpp"

namespace hpcids::aes {

AesState::AesState(const Key& key) : key_(key) {
  for (int i = 0; i < 16; ++i) round_keys_[i] = key[i];
  std::uint8_t rcon = 0x01;
  for (int word = 4; word < 4 * (kRounds + 1); ++word) {
    std::uint8_t t[4];
    for (int b = 0; b < 4; ++b) t[b] = round_keys_[4 * (word - 1) + b];
    if (word % 4 == 0) {
      // RotWord, SubWord, Rcon
      const std::uint8_t first = t[0];
      t[0] = static_cast<std::uint8_t>(kSbox[t[1]] ^ rcon);
      t[1] = kSbox[t[2]];
      t[2] = kSbox[t[3]];
      t[3] = kSbox[first];
      rcon = detail::xtime(rcon);
    }
    for (int b = 0; b < 4; ++b)
      round_keys_[4 * word + b] = static_cast<std::uint8_t>(round_keys_[4 * (word - 4) + b] ^ t[b]);
  }
}

}  // namespace hpcids::aes
