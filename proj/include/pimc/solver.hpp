// SPDX-License-Identifier: Apache-2.0
#pragma once

// Runs an external SMT-LIB solver on a script and reads its verdict and model.
// POSIX only: the solver is a `/bin/sh -c` command in its own process group.

#include "csp.hpp"
#include "errors.hpp"
#include "smtlib.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <optional>
#include <string>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace pimc
{

struct solver_config
{
    // Shell command; `{file}` is replaced by the script path, which is
    // appended when the placeholder is absent.
    std::string command;
    double timeout_seconds = 60;
};

enum class solver_status { sat, unsat, unknown, timeout, solver_error };

inline const char* to_string( solver_status s )
{
    switch ( s ) {
    case solver_status::sat:
        return "sat";
    case solver_status::unsat:
        return "unsat";
    case solver_status::unknown:
        return "unknown";
    case solver_status::timeout:
        return "timeout";
    case solver_status::solver_error:
        return "solver-error";
    }
    return "?";
}

struct verdict
{
    solver_status status = solver_status::unknown;
    std::map< std::string, model_value > model; // only for sat
    bool approximate = false;
    std::string message;
    std::string raw;
    double seconds = 0;
};

struct process_result
{
    int exit_code = -1;
    bool timed_out = false;
    std::string out;
    std::string err;
    double seconds = 0;
};

inline std::string shell_quote( const std::string& s )
{
    std::string out = "'";
    for ( char c : s ) {
        if ( c == '\'' )
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}

inline process_result run_command( const std::string& command, double timeout_seconds )
{
    int out_pipe[ 2 ], err_pipe[ 2 ];
    if ( pipe( out_pipe ) != 0 )
        throw solver_error( std::string( "pipe: " ) + std::strerror( errno ) );
    if ( pipe( err_pipe ) != 0 ) {
        close( out_pipe[ 0 ] );
        close( out_pipe[ 1 ] );
        throw solver_error( std::string( "pipe: " ) + std::strerror( errno ) );
    }
    const auto start = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if ( pid < 0 )
        throw solver_error( std::string( "fork: " ) + std::strerror( errno ) );
    if ( pid == 0 ) {
        setpgid( 0, 0 );
        dup2( out_pipe[ 1 ], STDOUT_FILENO );
        dup2( err_pipe[ 1 ], STDERR_FILENO );
        close( out_pipe[ 0 ] );
        close( out_pipe[ 1 ] );
        close( err_pipe[ 0 ] );
        close( err_pipe[ 1 ] );
        int devnull = open( "/dev/null", O_RDONLY );
        if ( devnull >= 0 )
            dup2( devnull, STDIN_FILENO );
        execl( "/bin/sh", "sh", "-c", command.c_str(), static_cast< char* >( nullptr ) );
        _exit( 127 );
    }
    setpgid( pid, pid );
    close( out_pipe[ 1 ] );
    close( err_pipe[ 1 ] );

    process_result r;
    pollfd fds[ 2 ] = { { out_pipe[ 0 ], POLLIN, 0 }, { err_pipe[ 0 ], POLLIN, 0 } };
    std::string* sinks[ 2 ] = { &r.out, &r.err };
    int open_fds = 2;
    auto elapsed = [ & ] { return std::chrono::duration< double >( std::chrono::steady_clock::now() - start ).count(); };
    while ( open_fds > 0 ) {
        double left = timeout_seconds - elapsed();
        if ( timeout_seconds > 0 && left <= 0 ) {
            r.timed_out = true;
            kill( -pid, SIGKILL );
            break;
        }
        int wait_ms = timeout_seconds > 0 ? static_cast< int >( left * 1000 ) + 1 : -1;
        int n = poll( fds, 2, wait_ms );
        if ( n < 0 ) {
            if ( errno == EINTR )
                continue;
            kill( -pid, SIGKILL );
            break;
        }
        for ( int k = 0; k < 2; ++k ) {
            if ( fds[ k ].fd < 0 || !( fds[ k ].revents & ( POLLIN | POLLHUP | POLLERR ) ) )
                continue;
            char buf[ 4096 ];
            ssize_t got = read( fds[ k ].fd, buf, sizeof buf );
            if ( got > 0 ) {
                sinks[ k ]->append( buf, static_cast< std::size_t >( got ) );
            } else if ( got == 0 || errno != EINTR ) {
                close( fds[ k ].fd );
                fds[ k ].fd = -1;
                --open_fds;
            }
        }
    }
    for ( auto& f : fds )
        if ( f.fd >= 0 )
            close( f.fd );
    int status = 0;
    while ( waitpid( pid, &status, 0 ) < 0 && errno == EINTR ) {
    }
    if ( !r.timed_out )
        kill( -pid, SIGKILL ); // stray children of the shell
    r.exit_code = WIFEXITED( status ) ? WEXITSTATUS( status ) : 128 + WTERMSIG( status );
    r.seconds = elapsed();
    return r;
}

// Reads `sat`/`unsat`/`unknown` and, after `sat`, the model printed by
// (get-model). Both the bare list and the older `(model ...)` form are read.
inline verdict parse_solver_output( const std::string& out )
{
    verdict v;
    v.raw = out;
    std::size_t pos = 0;
    std::string first;
    while ( pos < out.size() ) {
        std::size_t end = out.find( '\n', pos );
        if ( end == std::string::npos )
            end = out.size();
        std::string line = out.substr( pos, end - pos );
        pos = end + 1;
        while ( !line.empty() && std::isspace( static_cast< unsigned char >( line.back() ) ) )
            line.pop_back();
        std::size_t lead = line.find_first_not_of( " \t" );
        if ( lead == std::string::npos )
            continue;
        first = line.substr( lead );
        break;
    }
    if ( first == "unsat" ) {
        v.status = solver_status::unsat;
        return v;
    }
    if ( first == "unknown" ) {
        v.status = solver_status::unknown;
        return v;
    }
    if ( first == "timeout" ) {
        v.status = solver_status::timeout;
        return v;
    }
    if ( first != "sat" ) {
        v.status = solver_status::solver_error;
        v.message = first.empty() ? "empty solver output" : "unexpected solver output: " + first;
        return v;
    }
    v.status = solver_status::sat;
    try {
        auto rest = parse_sexprs( pos < out.size() ? out.substr( pos ) : std::string() );
        if ( rest.empty() )
            throw error( "sat without a model" );
        const sexpr* model = &rest[ 0 ];
        if ( model->head( "error" ) )
            throw error( "solver error: " + ( model->items.size() > 1 ? model->items[ 1 ].text : std::string() ) );
        if ( model->atom )
            throw error( "model is not a list" );
        std::size_t first_item = model->head( "model" ) ? 1 : 0;
        for ( std::size_t k = first_item; k < model->items.size(); ++k ) {
            const sexpr& d = model->items[ k ];
            if ( !d.head( "define-fun" ) || d.items.size() != 5 )
                throw error( "unexpected model entry" );
            if ( !d.items[ 2 ].atom && !d.items[ 2 ].items.empty() )
                continue; // helper functions with arguments
            auto value = read_model_value( d.items[ 4 ] );
            v.approximate = v.approximate || value.approximate;
            v.model[ d.items[ 1 ].text ] = value;
        }
    } catch ( const error& e ) {
        v.status = solver_status::solver_error;
        v.model.clear();
        v.approximate = false;
        v.message = e.what();
    }
    return v;
}

// Model values of the declared variables: all present with the right sort
// and inside their domains (counters may be any real satisfying the relaxed
// reading). Returns the first problem found.
inline std::optional< std::string > check_model( const csp& c, const verdict& v )
{
    for ( const auto& var : c.vars() ) {
        auto it = v.model.find( var.name );
        if ( it == v.model.end() )
            return "model misses variable " + var.name;
        const auto& x = it->second;
        if ( x.is_bool != ( var.sort == var_sort::boolean ) )
            return "model value of " + var.name + " has the wrong sort";
        if ( x.is_bool )
            continue;
        rational slack = x.approximate ? rational( 1, 1L << 30 ) : rational( 0 );
        if ( x.number < var.lo - slack || x.number > var.hi + slack )
            return "model value of " + var.name + " = " + to_string( x.number ) + " outside its domain";
        if ( var.sort == var_sort::counter && x.number < 1 && x.number != 0 && !x.approximate )
            return "model value of counter " + var.name + " in (0, 1)";
    }
    return std::nullopt;
}

inline assignment to_assignment( const verdict& v )
{
    assignment a;
    for ( const auto& [ name, x ] : v.model ) {
        if ( x.is_bool )
            a[ name ] = x.boolean;
        else
            a[ name ] = x.number;
    }
    return a;
}

namespace detail
{

class temp_file
{
    std::string _path;

public:
    explicit temp_file( const std::string& contents )
    {
        const char* dir = std::getenv( "TMPDIR" );
        std::string pattern = std::string( dir && *dir ? dir : "/tmp" ) + "/pimc-XXXXXX.smt2";
        std::string buf = pattern;
        int fd = mkstemps( buf.data(), 5 );
        if ( fd < 0 )
            throw solver_error( "cannot create temporary file " + pattern );
        _path = buf;
        std::size_t done = 0;
        while ( done < contents.size() ) {
            ssize_t n = write( fd, contents.data() + done, contents.size() - done );
            if ( n <= 0 ) {
                close( fd );
                std::remove( _path.c_str() );
                throw solver_error( "cannot write " + _path );
            }
            done += static_cast< std::size_t >( n );
        }
        close( fd );
    }
    temp_file( const temp_file& ) = delete;
    temp_file& operator=( const temp_file& ) = delete;
    ~temp_file() { std::remove( _path.c_str() ); }

    [[nodiscard]] const std::string& path() const { return _path; }
};

} // namespace detail

inline std::string solver_command_line( const std::string& command, const std::string& file )
{
    const std::string placeholder = "{file}";
    std::string out = command;
    std::size_t at = out.find( placeholder );
    if ( at == std::string::npos )
        return out + " " + shell_quote( file );
    const std::string quoted = shell_quote( file );
    while ( at != std::string::npos ) {
        out.replace( at, placeholder.size(), quoted );
        at = out.find( placeholder, at + quoted.size() );
    }
    return out;
}

inline verdict run_solver( const smt_script& script, const solver_config& cfg )
{
    if ( cfg.command.empty() )
        throw solver_error( "no solver command configured" );
    detail::temp_file file( script.text );
    auto r = run_command( solver_command_line( cfg.command, file.path() ), cfg.timeout_seconds );
    verdict v;
    if ( r.timed_out ) {
        v.status = solver_status::timeout;
        v.raw = r.out;
        v.message = "no answer within " + std::to_string( cfg.timeout_seconds ) + " s";
    } else if ( r.exit_code == 127 && r.out.empty() ) {
        v.status = solver_status::solver_error;
        v.message = "solver executable not found: " + r.err;
    } else {
        v = parse_solver_output( r.out );
        if ( v.status == solver_status::solver_error && !r.err.empty() )
            v.message += "; stderr: " + r.err;
    }
    v.seconds = r.seconds;
    return v;
}

} // namespace pimc
