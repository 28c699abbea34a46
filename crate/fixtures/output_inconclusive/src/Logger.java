public class Logger {
    native void log(String msg);

    void info(String msg) {
        log(msg);
    }
}
