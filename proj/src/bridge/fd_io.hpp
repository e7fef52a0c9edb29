#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace latentprobe::detail {

// Blocking write of the whole buffer. `socket` selects send(MSG_NOSIGNAL).
void write_all(int fd, std::string_view data, bool socket);

// Reads until '\n' or the deadline. Bytes past the newline stay in `buffer`.
std::string read_line(int fd, std::string& buffer, std::chrono::milliseconds timeout);

}  // namespace latentprobe::detail
