// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rofso {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error("input: " + msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error("format: " + msg) {}
};

struct MeasurementError : std::runtime_error {
    explicit MeasurementError(const std::string& msg) : std::runtime_error("measurement: " + msg) {}
};

struct SyncError : std::runtime_error {
    explicit SyncError(const std::string& msg) : std::runtime_error("sync: " + msg) {}
};

struct LockError : std::runtime_error {
    explicit LockError(const std::string& msg) : std::runtime_error("carrier lock: " + msg) {}
};

struct DspError : std::runtime_error {
    explicit DspError(const std::string& msg) : std::runtime_error("dsp: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io: " + msg) {}
};

}  // namespace rofso
