// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kfrag {

enum class Errc {
    InvalidParams,
    ZeroInverse,
    RngFailure,
    NotEnoughFragments,
    InconsistentSet,
    CorruptFragment,
    RangeOutOfBounds,
    DuplicatePosition,
    DuplicateIndex,
    LengthMismatch,
    InvalidHeader,
    BadMagic,
    UnsupportedVersion,
    CrcMismatch,
    TruncatedInput,
    EmptyInput,
    SampleTooSmall,
    ZeroVariance,
    DelayTooLarge,
    InvalidMatrix,
};

constexpr std::string_view to_string(Errc e) noexcept
{
    switch (e) {
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::ZeroInverse: return "ZeroInverse";
    case Errc::RngFailure: return "RngFailure";
    case Errc::NotEnoughFragments: return "NotEnoughFragments";
    case Errc::InconsistentSet: return "InconsistentSet";
    case Errc::CorruptFragment: return "CorruptFragment";
    case Errc::RangeOutOfBounds: return "RangeOutOfBounds";
    case Errc::DuplicatePosition: return "DuplicatePosition";
    case Errc::DuplicateIndex: return "DuplicateIndex";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidHeader: return "InvalidHeader";
    case Errc::BadMagic: return "BadMagic";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::CrcMismatch: return "CrcMismatch";
    case Errc::TruncatedInput: return "TruncatedInput";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::SampleTooSmall: return "SampleTooSmall";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::DelayTooLarge: return "DelayTooLarge";
    case Errc::InvalidMatrix: return "InvalidMatrix";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// message starts with the code name so CLI diagnostics can be grepped.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace kfrag
