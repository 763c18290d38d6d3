#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "amcp/image.hpp"
#include "amcp/prompt.hpp"

namespace amcp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitBackend = 3;

// Runs one subcommand. The JSON summary line goes to `out`, logs and errors
// to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// point:X,Y[;X,Y...] | box:x0,y0,x1,y1 | scribble:path.png | mask:path.png
// Throws amcp::Error (kInvalidArgument) on malformed text.
Prompt parse_prompt(const std::string& text);

// Image with the one-pixel inner boundary of `mask` drawn in red.
ImageBuf overlay(const ImageBuf& image, const BitMask& mask);

}  // namespace amcp::cli
