// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

namespace loom {

// Local HTTP service with JSON bodies:
//   POST /compile               {source, profile, store}  -> program or diagnostics
//   POST /session               {program | source+profile, engine} -> {id, ...}
//   POST /session/{id}/tick     {patches: [{slot, value}], max_steps}
//   GET  /session/{id}/state    ?rows=a:b&cols=c:d for a state-matrix slice
//   POST /session/{id}/reset
//   DELETE /session/{id}
// Requests on one session are serialized; sessions run concurrently.
class Service {
public:
    Service();
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Binds to host:port (port 0 picks a free one) and returns the port,
    // or -1 on failure.
    int bind(const std::string& host, int port);
    // Serves until stop() is called.
    bool listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace loom
