// SPDX-License-Identifier: Apache-2.0
#include "test_support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

using namespace pimc::testing;
using json = nlohmann::json;

namespace
{

struct run_result
{
    int exit = -1;
    std::string out;
};

std::string cli() { return env_or( "PIMC_CLI", "build/pimc" ); }

// Runs the CLI with stderr discarded and the given environment prefix.
run_result run( const std::string& args, const std::string& env = "env -u PIMC_SOLVER_CMD" )
{
    std::string cmd = env + " " + cli() + " " + args + " 2>/dev/null";
    run_result r;
    FILE* f = popen( cmd.c_str(), "r" );
    if ( !f )
        return r;
    char buf[ 4096 ];
    std::size_t n;
    while ( ( n = fread( buf, 1, sizeof buf, f ) ) > 0 )
        r.out.append( buf, n );
    int status = pclose( f );
    r.exit = WIFEXITED( status ) ? WEXITSTATUS( status ) : -1;
    return r;
}

std::string fx( const std::string& file ) { return fixture_path( file ); }

std::string with_solver()
{
    return "PIMC_SOLVER_CMD='" + solver_command() + "'";
}

#define REQUIRE_SOLVER()                                                                                               \
    if ( solver_command().empty() )                                                                                    \
    GTEST_SKIP() << "PIMC_TEST_SOLVER not set"

} // namespace

TEST( Cli, Usage )
{
    EXPECT_EQ( run( "" ).exit, 3 );
    EXPECT_EQ( run( "frobnicate" ).exit, 3 );
    EXPECT_EQ( run( "check nonsense " + fx( "fig5.pimc" ) ).exit, 3 );
    EXPECT_EQ( run( "check consistency /nonexistent.pimc --emit-only" ).exit, 3 );
    EXPECT_EQ( run( "--help" ).exit, 0 );
}

TEST( Cli, CheckNeedsASolver )
{
    EXPECT_EQ( run( "check consistency " + fx( "fig5.pimc" ) ).exit, 3 );
    EXPECT_EQ( run( "check consistency " + fx( "fig5.pimc" ) + " --solver /nonexistent/solver" ).exit, 4 );
}

TEST( Cli, EvalExactValues )
{
    auto path = run( "eval path " + fx( "fig1_m1.mc" ) + " s0 s2 s1 s1 s3" );
    EXPECT_EQ( path.exit, 0 );
    EXPECT_EQ( path.out.rfind( "3/80", 0 ), 0u ) << path.out;
    auto reach = run( "eval reach " + fx( "fig1_m1.mc" ) + " s1 --states --json" );
    ASSERT_EQ( reach.exit, 0 );
    auto j = json::parse( reach.out );
    EXPECT_EQ( j[ "schema" ], 1 );
    EXPECT_EQ( j[ "command" ], "eval" );
    EXPECT_EQ( run( "eval reach " + fx( "fig1_m1.mc" ) + " beta" ).out.rfind( "3/10", 0 ), 0u );
}

TEST( Cli, EmitOnlyJson )
{
    auto r = run( "check consistency " + fx( "fig5.pimc" ) + " --emit-only --json" );
    ASSERT_EQ( r.exit, 0 );
    auto j = json::parse( r.out );
    EXPECT_EQ( j[ "schema" ], 1 );
    EXPECT_EQ( j[ "command" ], "check" );
    EXPECT_EQ( j[ "encoding" ][ "variables" ], 17 );
    EXPECT_TRUE( j[ "verdict" ].is_null() );
}

TEST( Cli, EncodeMatchesGolden )
{
    auto r = run( "encode consistency " + fx( "fig5.pimc" ) );
    ASSERT_EQ( r.exit, 0 );
    std::ifstream in( golden_path( "fig5_consistency.smt2" ), std::ios::binary );
    std::string golden( ( std::istreambuf_iterator< char >( in ) ), std::istreambuf_iterator< char >() );
    EXPECT_EQ( r.out, golden );
    EXPECT_EQ( run( "encode quant-reach beta " + fx( "fig5.pimc" ) + " --goal prob:ge:0.3" ).out,
               run( "encode quant-reach beta " + fx( "fig5.pimc" ) + " --goal prob:ge:0.3" ).out );
}

TEST( Cli, BenchPresets )
{
    auto r = run( "bench layered --preset nand-n2-shape --seed 3" );
    ASSERT_EQ( r.exit, 0 );
    auto p = std::get< pimc::param_imc >( pimc::parse_model( r.out ) );
    EXPECT_EQ( p.state_count(), 104u );
    EXPECT_EQ( p.params().size(), 4u );
    EXPECT_EQ( r.out, run( "bench layered --preset nand-n2-shape --seed 3" ).out );
}

TEST( Cli, Semantics )
{
    EXPECT_EQ( run( "semantics aes-decide " + fx( "fig8_m2.mc" ) + " " + fx( "fig8_i.imc" ) ).exit, 0 );
    auto split = run( "semantics split " + fx( "fig8_m2.mc" ) + " " + fx( "fig8_i.imc" ) + " --json" );
    ASSERT_EQ( split.exit, 0 );
    EXPECT_EQ( json::parse( split.out )[ "schema" ], 1 );
}

TEST( Cli, Oracle )
{
    EXPECT_EQ( run( "oracle consistency " + fx( "fig5.pimc" ) + " --grid 4" ).exit, 0 );
    EXPECT_EQ( run( "oracle reach-forall beta " + fx( "fig5.pimc" ) + " --grid 4" ).exit, 1 );
}

TEST( Cli, CheckWithSolver )
{
    REQUIRE_SOLVER();
    const std::string f = fx( "fig5.pimc" );
    auto sat = run( "check consistency " + f + " --json", with_solver() );
    ASSERT_EQ( sat.exit, 0 ) << sat.out;
    auto j = json::parse( sat.out );
    EXPECT_EQ( j[ "verdict" ], "sat" );
    EXPECT_EQ( j[ "holds" ], true );
    EXPECT_TRUE( j.contains( "witness" ) );

    EXPECT_EQ( run( "check reach-exists beta " + f, with_solver() ).exit, 0 );
    EXPECT_EQ( run( "check reach-forall beta " + f, with_solver() ).exit, 1 );
    EXPECT_EQ( run( "check quant-forall beta le 1 " + f, with_solver() ).exit, 0 );
    EXPECT_EQ( run( "check quant beta '>' 1 " + f, with_solver() ).exit, 1 );
    EXPECT_EQ( run( "check consistency " + f + " --solver '" + solver_command() + "'" ).exit, 0 );
}

TEST( Cli, BatchMode )
{
    REQUIRE_SOLVER();
    auto r = run( "check consistency " + fx( "fig5.pimc" ) + " " + fx( "fig2_pmc.pimc" ) + " --jobs 2",
                  with_solver() );
    EXPECT_EQ( r.exit, 0 ) << r.out;
}

TEST( Cli, TimeoutIsUnknown )
{
    auto r = run( "check consistency " + fx( "fig5.pimc" ) + " --solver 'sleep 10; echo {file}' --timeout 0.3" );
    EXPECT_EQ( r.exit, 2 );
}
