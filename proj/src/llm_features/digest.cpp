#include <openssl/evp.h>

#include <array>
#include <stdexcept>

#include "persuade/llm_client.hpp"

namespace persuade {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string cache_key(std::string_view model_name, std::string_view prompt) {
  std::string material;
  material.reserve(model_name.size() + 1 + prompt.size());
  material.append(model_name).append("\n").append(prompt);
  return sha256_hex(material);
}

}  // namespace persuade
