package net.io;

public class Net {
    private native void send(String payload);

    public void transmit(String payload) {
        send(payload);
    }
}
